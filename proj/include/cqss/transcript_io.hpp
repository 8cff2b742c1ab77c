#pragma once

#include <complex>
#include <string>

#include "cqss/analysis.hpp"
#include "cqss/epr_qudit.hpp"
#include "cqss/protocol.hpp"

// Line-oriented text renderings of sessions and their derived reports.
// Every format opens with a "cqss-<kind> v1" header line. All numbers are
// rendered deterministically (17 significant digits for doubles), there are
// no timestamps, and two runs with equal seeds yield byte-identical files;
// the test suite holds the renderers to that.

namespace cqss {

std::string fmt_double(double v);
std::string format_complex(std::complex<double> z);

// "single", "epr", or "qudit:<d>".
std::string variant_tag(Variant v, int qudit_dim);

// Key digits as a compact string: one hex character per digit for bases up
// to 16 (every supported base), space-separated integers otherwise.
std::string digits_to_string(const std::vector<int>& digits, int base);

std::string render_transcript(const SessionTranscript& t);
std::string render_transcript(const EprSessionTranscript& t);
std::string render_sample_report(const SampleReport& r);
std::string render_key_material(const KeyMaterial& k);
std::string render_summary(const SessionTranscript& t, const SampleReport& r,
                           const KeyMaterial& k, const EfficiencyReport& eff,
                           double abort_threshold);
std::string render_summary(const EprSessionTranscript& t, const SampleReport& r,
                           const KeyMaterial& k, const EfficiencyReport& eff,
                           double abort_threshold);

std::string render_curve_csv(const std::vector<CurvePoint>& points);
std::string render_sweep_csv(const std::vector<TheoryComparisonRow>& rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace cqss
