#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cqss/random.hpp"

// Exact simulation of small multi-qudit systems on dense Eigen storage.
//
// Composite indices follow the tensor convention that subsystem 0 is the
// slowest-varying digit: for dims {d0, d1, ..., dk} the amplitude of
// |i0 i1 ... ik> sits at i0*(d1*...*dk) + i1*(d2*...*dk) + ... + ik.
// Everything that touches a subset of subsystems (apply, measure,
// partial_trace) is expressed through offset tables for that convention.

namespace cqss {

template <typename Scalar>
using ComplexVec = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using ComplexMat = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

// Tolerances by scalar type. `construction` guards invariants when a value
// is built (norms, unitarity, hermiticity), `algebraic` is the default for
// identity checks between computed values, `psd` is the slack allowed on
// density-matrix eigenvalues before they count as genuinely negative.
template <typename Scalar>
struct num_tol;
template <>
struct num_tol<float> {
  static constexpr float construction = 1e-4f;
  static constexpr float algebraic = 1e-3f;
  static constexpr float psd = 1e-3f;
};
template <>
struct num_tol<double> {
  static constexpr double construction = 1e-12;
  static constexpr double algebraic = 1e-10;
  static constexpr double psd = 1e-10;
};
template <>
struct num_tol<long double> {
  static constexpr long double construction = 1e-15L;
  static constexpr long double algebraic = 1e-13L;
  static constexpr long double psd = 1e-13L;
};

enum class Axis { Z, X };

// The four single-qubit preparations the protocol draws from.
enum class QubitKet { plus_z, minus_z, plus_x, minus_x };

template <typename Scalar = double>
class PureState {
 public:
  using Complex = std::complex<Scalar>;
  using Vector = ComplexVec<Scalar>;

  PureState(std::vector<int> dims, Vector amplitudes)
      : dims_(std::move(dims)), amps_(std::move(amplitudes)) {
    if (dims_.empty())
      throw std::invalid_argument("PureState: dims must be non-empty");
    Eigen::Index expect = 1;
    for (int d : dims_) {
      if (d < 2) throw std::invalid_argument("PureState: subsystem dim must be >= 2");
      expect *= d;
    }
    if (amps_.size() != expect)
      throw std::invalid_argument("PureState: amplitude count does not match dims");
    if (std::abs(amps_.squaredNorm() - Scalar(1)) > num_tol<Scalar>::construction)
      throw std::invalid_argument("PureState: not normalized");
  }

  const std::vector<int>& dims() const { return dims_; }
  int subsystem_count() const { return static_cast<int>(dims_.size()); }
  Eigen::Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }
  Complex amp(Eigen::Index i) const { return amps_(i); }

 private:
  std::vector<int> dims_;
  Vector amps_;
};

template <typename Scalar = double>
class UnitaryOp {
 public:
  using Matrix = ComplexMat<Scalar>;

  explicit UnitaryOp(Matrix m) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols())
      throw std::invalid_argument("UnitaryOp: matrix must be square and non-empty");
    Matrix gram = m_ * m_.adjoint();
    gram.diagonal().array() -= Scalar(1);
    if (gram.cwiseAbs().maxCoeff() > num_tol<Scalar>::construction)
      throw std::invalid_argument("UnitaryOp: matrix is not unitary");
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

template <typename Scalar = double>
class DensityMatrix {
 public:
  using Matrix = ComplexMat<Scalar>;

  DensityMatrix(std::vector<int> dims, Matrix m)
      : dims_(std::move(dims)), m_(std::move(m)) {
    if (dims_.empty())
      throw std::invalid_argument("DensityMatrix: dims must be non-empty");
    Eigen::Index expect = 1;
    for (int d : dims_) {
      if (d < 2) throw std::invalid_argument("DensityMatrix: subsystem dim must be >= 2");
      expect *= d;
    }
    if (m_.rows() != expect || m_.cols() != expect)
      throw std::invalid_argument("DensityMatrix: shape does not match dims");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > num_tol<Scalar>::construction)
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m_.trace() - std::complex<Scalar>(1)) > num_tol<Scalar>::construction)
      throw std::invalid_argument("DensityMatrix: trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -num_tol<Scalar>::psd)
      throw std::invalid_argument("DensityMatrix: significantly negative eigenvalue");
  }

  const std::vector<int>& dims() const { return dims_; }
  int subsystem_count() const { return static_cast<int>(dims_.size()); }
  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  std::vector<int> dims_;
  Matrix m_;
};

// ---------------------------------------------------------------------------
// kets

template <typename Scalar = double>
PureState<Scalar> basis_ket(int index, int dim) {
  if (dim < 2) throw std::invalid_argument("basis_ket: dim must be >= 2");
  if (index < 0 || index >= dim)
    throw std::invalid_argument("basis_ket: index out of range");
  ComplexVec<Scalar> v = ComplexVec<Scalar>::Zero(dim);
  v(index) = Scalar(1);
  return PureState<Scalar>({dim}, std::move(v));
}

template <typename Scalar = double>
PureState<Scalar> ket(QubitKet which) {
  const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
  ComplexVec<Scalar> v(2);
  switch (which) {
    case QubitKet::plus_z:  v << Scalar(1), Scalar(0); break;
    case QubitKet::minus_z: v << Scalar(0), Scalar(1); break;
    case QubitKet::plus_x:  v << r, r; break;
    case QubitKet::minus_x: v << r, -r; break;
    default: throw std::invalid_argument("ket: unknown label");
  }
  return PureState<Scalar>({2}, std::move(v));
}

// Preparation labelled by basis axis and classical bit (bit 0 = the +
// eigenstate of that axis).
inline QubitKet qubit_ket(Axis axis, int bit) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("qubit_ket: bit must be 0 or 1");
  if (axis == Axis::Z) return bit == 0 ? QubitKet::plus_z : QubitKet::minus_z;
  return bit == 0 ? QubitKet::plus_x : QubitKet::minus_x;
}

// ---------------------------------------------------------------------------
// measurement bases

template <typename Scalar = double>
class MeasBasis {
 public:
  // Qubit standard bases, tagged with their axis so records can name them.
  static MeasBasis z() { return MeasBasis(Axis::Z, {ket<Scalar>(QubitKet::plus_z), ket<Scalar>(QubitKet::minus_z)}); }
  static MeasBasis x() { return MeasBasis(Axis::X, {ket<Scalar>(QubitKet::plus_x), ket<Scalar>(QubitKet::minus_x)}); }

  static MeasBasis standard(Axis axis) { return axis == Axis::Z ? z() : x(); }

  // |0>, ..., |d-1> for a single d-level subsystem.
  static MeasBasis computational(int dim) {
    std::vector<PureState<Scalar>> vs;
    vs.reserve(dim);
    for (int j = 0; j < dim; ++j) vs.push_back(basis_ket<Scalar>(j, dim));
    MeasBasis b(std::nullopt, std::move(vs));
    if (dim == 2) b.axis_ = Axis::Z;
    return b;
  }

  // Arbitrary orthonormal basis; states must share dims and span the space.
  static MeasBasis explicit_basis(std::vector<PureState<Scalar>> states) {
    return MeasBasis(std::nullopt, std::move(states));
  }

  int count() const { return static_cast<int>(vecs_.size()); }
  Eigen::Index dim() const { return vecs_.front().dim(); }
  std::optional<Axis> axis() const { return axis_; }
  const std::vector<PureState<Scalar>>& vectors() const { return vecs_; }

 private:
  MeasBasis(std::optional<Axis> axis, std::vector<PureState<Scalar>> vecs)
      : axis_(axis), vecs_(std::move(vecs)) {
    if (vecs_.empty()) throw std::invalid_argument("MeasBasis: empty basis");
    const Eigen::Index d = vecs_.front().dim();
    if (static_cast<Eigen::Index>(vecs_.size()) != d)
      throw std::invalid_argument("MeasBasis: basis does not span the space");
    for (const auto& v : vecs_)
      if (v.dim() != d) throw std::invalid_argument("MeasBasis: mixed dimensions");
    for (std::size_t a = 0; a < vecs_.size(); ++a)
      for (std::size_t b = a; b < vecs_.size(); ++b) {
        const std::complex<Scalar> g = vecs_[a].amplitudes().dot(vecs_[b].amplitudes());
        const Scalar want = a == b ? Scalar(1) : Scalar(0);
        if (std::abs(g - want) > num_tol<Scalar>::construction)
          throw std::invalid_argument("MeasBasis: basis is not orthonormal");
      }
  }

  std::optional<Axis> axis_;
  std::vector<PureState<Scalar>> vecs_;
};

using PureStated = PureState<double>;
using UnitaryOpd = UnitaryOp<double>;
using DensityMatrixd = DensityMatrix<double>;
using MeasBasisd = MeasBasis<double>;

// ---------------------------------------------------------------------------
// index plumbing

namespace detail {

inline std::vector<Eigen::Index> strides_for(const std::vector<int>& dims) {
  std::vector<Eigen::Index> s(dims.size());
  Eigen::Index acc = 1;
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    s[static_cast<std::size_t>(k)] = acc;
    acc *= dims[static_cast<std::size_t>(k)];
  }
  return s;
}

inline void check_targets(const std::vector<int>& dims, std::span<const int> targets) {
  if (targets.empty()) throw std::invalid_argument("targets must be non-empty");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= static_cast<int>(dims.size()))
      throw std::invalid_argument("target subsystem out of range");
    for (std::size_t j = i + 1; j < targets.size(); ++j)
      if (targets[i] == targets[j])
        throw std::invalid_argument("duplicate target subsystem");
  }
}

// Offsets of every assignment of the target digits, targets[0] slowest.
// Offset 0 corresponds to all target digits zero.
inline std::vector<Eigen::Index> target_offsets(const std::vector<int>& dims,
                                                std::span<const int> targets) {
  const auto strides = strides_for(dims);
  Eigen::Index count = 1;
  for (int t : targets) count *= dims[static_cast<std::size_t>(t)];
  std::vector<Eigen::Index> offs(static_cast<std::size_t>(count));
  for (Eigen::Index v = 0; v < count; ++v) {
    Eigen::Index rem = v, off = 0;
    for (int j = static_cast<int>(targets.size()) - 1; j >= 0; --j) {
      const int t = targets[static_cast<std::size_t>(j)];
      const int d = dims[static_cast<std::size_t>(t)];
      off += (rem % d) * strides[static_cast<std::size_t>(t)];
      rem /= d;
    }
    offs[static_cast<std::size_t>(v)] = off;
  }
  return offs;
}

// Composite indices whose target digits are all zero; adding a target offset
// to each base enumerates the whole space exactly once.
inline std::vector<Eigen::Index> rest_bases(const std::vector<int>& dims,
                                            std::span<const int> targets,
                                            Eigen::Index total) {
  const auto strides = strides_for(dims);
  Eigen::Index block = 1;
  for (int t : targets) block *= dims[static_cast<std::size_t>(t)];
  std::vector<Eigen::Index> bases;
  bases.reserve(static_cast<std::size_t>(total / block));
  for (Eigen::Index i = 0; i < total; ++i) {
    bool zero = true;
    for (int t : targets) {
      const auto st = static_cast<std::size_t>(t);
      if ((i / strides[st]) % dims[st] != 0) { zero = false; break; }
    }
    if (zero) bases.push_back(i);
  }
  return bases;
}

template <typename Scalar>
ComplexMat<Scalar> kron(const ComplexMat<Scalar>& a, const ComplexMat<Scalar>& b) {
  ComplexMat<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// composition

template <typename Scalar>
PureState<Scalar> tensor(const PureState<Scalar>& a, const PureState<Scalar>& b) {
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  ComplexVec<Scalar> v(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i)
    v.segment(i * b.dim(), b.dim()) = a.amp(i) * b.amplitudes();
  return PureState<Scalar>(std::move(dims), std::move(v));
}

template <typename Scalar>
UnitaryOp<Scalar> tensor(const UnitaryOp<Scalar>& a, const UnitaryOp<Scalar>& b) {
  return UnitaryOp<Scalar>(detail::kron<Scalar>(a.matrix(), b.matrix()));
}

template <typename Scalar>
DensityMatrix<Scalar> tensor(const DensityMatrix<Scalar>& a, const DensityMatrix<Scalar>& b) {
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityMatrix<Scalar>(std::move(dims), detail::kron<Scalar>(a.matrix(), b.matrix()));
}

template <typename Scalar = double>
UnitaryOp<Scalar> identity_op(int dim) {
  if (dim < 1) throw std::invalid_argument("identity_op: dim must be >= 1");
  return UnitaryOp<Scalar>(ComplexMat<Scalar>::Identity(dim, dim));
}

// ---------------------------------------------------------------------------
// evolution

// Apply `u` to the listed subsystems of `s`, identity elsewhere. The
// operator's row/column index runs over the target digits with targets[0]
// slowest, matching the global convention.
template <typename Scalar>
PureState<Scalar> apply(const UnitaryOp<Scalar>& u, const PureState<Scalar>& s,
                        std::span<const int> targets) {
  detail::check_targets(s.dims(), targets);
  Eigen::Index block = 1;
  for (int t : targets) block *= s.dims()[static_cast<std::size_t>(t)];
  if (u.dim() != block)
    throw std::invalid_argument("apply: operator dim does not match targets");
  const auto offs = detail::target_offsets(s.dims(), targets);
  const auto bases = detail::rest_bases(s.dims(), targets, s.dim());
  ComplexVec<Scalar> out(s.dim());
  ComplexVec<Scalar> in_blk(block), out_blk(block);
  for (const Eigen::Index base : bases) {
    for (Eigen::Index v = 0; v < block; ++v)
      in_blk(v) = s.amp(base + offs[static_cast<std::size_t>(v)]);
    out_blk.noalias() = u.matrix() * in_blk;
    for (Eigen::Index v = 0; v < block; ++v)
      out(base + offs[static_cast<std::size_t>(v)]) = out_blk(v);
  }
  return PureState<Scalar>(s.dims(), std::move(out));
}

template <typename Scalar>
PureState<Scalar> apply(const UnitaryOp<Scalar>& u, const PureState<Scalar>& s,
                        std::initializer_list<int> targets) {
  std::vector<int> t(targets);
  return apply(u, s, std::span<const int>(t));
}

template <typename Scalar>
PureState<Scalar> apply(const UnitaryOp<Scalar>& u, const PureState<Scalar>& s, int target) {
  const int t[1] = {target};
  return apply(u, s, std::span<const int>(t, 1));
}

// U rho U^dagger on the full system.
template <typename Scalar>
DensityMatrix<Scalar> evolve(const UnitaryOp<Scalar>& u, const DensityMatrix<Scalar>& rho) {
  if (u.dim() != rho.dim())
    throw std::invalid_argument("evolve: operator dim does not match state");
  return DensityMatrix<Scalar>(rho.dims(), u.matrix() * rho.matrix() * u.matrix().adjoint());
}

// ---------------------------------------------------------------------------
// measurement

// Projective measurement of the listed subsystems in an orthonormal basis
// given as `block`-dimensional states (targets[0] slowest digit). Returns
// the sampled outcome index and the collapsed, renormalized state.
template <typename Scalar>
std::pair<int, PureState<Scalar>> measure_in_basis(const PureState<Scalar>& s,
                                                   std::span<const PureState<Scalar>> basis,
                                                   std::span<const int> targets,
                                                   std::mt19937_64& rng) {
  detail::check_targets(s.dims(), targets);
  Eigen::Index block = 1;
  for (int t : targets) block *= s.dims()[static_cast<std::size_t>(t)];
  if (static_cast<Eigen::Index>(basis.size()) != block)
    throw std::invalid_argument("measure_in_basis: basis does not span the target space");
  for (const auto& e : basis)
    if (e.dim() != block)
      throw std::invalid_argument("measure_in_basis: basis state dim mismatch");
  for (std::size_t a = 0; a < basis.size(); ++a)
    for (std::size_t b = a; b < basis.size(); ++b) {
      const std::complex<Scalar> g = basis[a].amplitudes().dot(basis[b].amplitudes());
      const Scalar want = a == b ? Scalar(1) : Scalar(0);
      if (std::abs(g - want) > num_tol<Scalar>::construction)
        throw std::invalid_argument("measure_in_basis: basis is not orthonormal");
    }

  const auto offs = detail::target_offsets(s.dims(), targets);
  const auto bases = detail::rest_bases(s.dims(), targets, s.dim());
  const auto nrest = static_cast<Eigen::Index>(bases.size());

  // coef(k, r) = <e_k, rest_r | s>
  ComplexMat<Scalar> coef(block, nrest);
  for (Eigen::Index k = 0; k < block; ++k)
    for (Eigen::Index r = 0; r < nrest; ++r) {
      std::complex<Scalar> c(0);
      for (Eigen::Index v = 0; v < block; ++v)
        c += std::conj(basis[static_cast<std::size_t>(k)].amp(v)) *
             s.amp(bases[static_cast<std::size_t>(r)] + offs[static_cast<std::size_t>(v)]);
      coef(k, r) = c;
    }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> probs(block);
  for (Eigen::Index k = 0; k < block; ++k) probs(k) = coef.row(k).squaredNorm();
  if (std::abs(probs.sum() - Scalar(1)) > num_tol<Scalar>::algebraic)
    throw std::runtime_error("measure_in_basis: probabilities do not sum to 1");

  const double u = uniform01(rng);
  int outcome = -1;
  Scalar cum(0);
  for (Eigen::Index k = 0; k < block; ++k) {
    cum += probs(k);
    if (u < static_cast<double>(cum)) { outcome = static_cast<int>(k); break; }
  }
  if (outcome < 0) {
    // Floating-point shortfall at u ~ 1; take the last outcome with mass.
    for (Eigen::Index k = block - 1; k >= 0; --k)
      if (probs(k) > Scalar(0)) { outcome = static_cast<int>(k); break; }
  }
  if (outcome < 0) throw std::runtime_error("measure_in_basis: no outcome has mass");

  ComplexVec<Scalar> post = ComplexVec<Scalar>::Zero(s.dim());
  const auto& ek = basis[static_cast<std::size_t>(outcome)];
  for (Eigen::Index r = 0; r < nrest; ++r)
    for (Eigen::Index v = 0; v < block; ++v)
      post(bases[static_cast<std::size_t>(r)] + offs[static_cast<std::size_t>(v)]) =
          coef(outcome, r) * ek.amp(v);
  post /= post.norm();
  return {outcome, PureState<Scalar>(s.dims(), std::move(post))};
}

template <typename Scalar>
std::pair<int, PureState<Scalar>> measure(const PureState<Scalar>& s,
                                          const MeasBasis<Scalar>& basis, int target,
                                          std::mt19937_64& rng) {
  if (target < 0 || target >= s.subsystem_count())
    throw std::invalid_argument("measure: target out of range");
  if (basis.dim() != s.dims()[static_cast<std::size_t>(target)])
    throw std::invalid_argument("measure: basis dim does not match target");
  const int t[1] = {target};
  return measure_in_basis<Scalar>(s, std::span<const PureState<Scalar>>(basis.vectors()),
                                  std::span<const int>(t, 1), rng);
}

// ---------------------------------------------------------------------------
// density matrices

template <typename Scalar>
DensityMatrix<Scalar> density_from_pure(const PureState<Scalar>& s) {
  return DensityMatrix<Scalar>(s.dims(), s.amplitudes() * s.amplitudes().adjoint());
}

// Convex combination; weights must be non-negative and sum to 1.
template <typename Scalar>
DensityMatrix<Scalar> mix(std::span<const std::pair<Scalar, DensityMatrix<Scalar>>> parts) {
  if (parts.empty()) throw std::invalid_argument("mix: no components");
  Scalar total(0);
  const auto& dims = parts.front().second.dims();
  ComplexMat<Scalar> acc = ComplexMat<Scalar>::Zero(parts.front().second.dim(),
                                                    parts.front().second.dim());
  for (const auto& [w, rho] : parts) {
    if (w < Scalar(0)) throw std::invalid_argument("mix: negative weight");
    if (rho.dims() != dims) throw std::invalid_argument("mix: mismatched dims");
    acc += w * rho.matrix();
    total += w;
  }
  if (std::abs(total - Scalar(1)) > num_tol<Scalar>::construction)
    throw std::invalid_argument("mix: weights do not sum to 1");
  return DensityMatrix<Scalar>(dims, std::move(acc));
}

template <typename Scalar>
DensityMatrix<Scalar> mix(std::initializer_list<std::pair<Scalar, DensityMatrix<Scalar>>> parts) {
  std::vector<std::pair<Scalar, DensityMatrix<Scalar>>> v(parts);
  return mix(std::span<const std::pair<Scalar, DensityMatrix<Scalar>>>(v));
}

// Trace out everything not listed in `keep`; result subsystems follow the
// order of `keep`, so it doubles as a subsystem permutation when all are kept.
template <typename Scalar>
DensityMatrix<Scalar> partial_trace(const DensityMatrix<Scalar>& rho, std::span<const int> keep) {
  detail::check_targets(rho.dims(), keep);
  std::vector<int> traced;
  for (int i = 0; i < rho.subsystem_count(); ++i) {
    bool kept = false;
    for (int k : keep) kept = kept || (k == i);
    if (!kept) traced.push_back(i);
  }
  const auto koffs = detail::target_offsets(rho.dims(), keep);
  std::vector<Eigen::Index> toffs{0};
  if (!traced.empty()) toffs = detail::target_offsets(rho.dims(), std::span<const int>(traced));

  const auto kept_count = static_cast<Eigen::Index>(koffs.size());
  ComplexMat<Scalar> out = ComplexMat<Scalar>::Zero(kept_count, kept_count);
  for (Eigen::Index i = 0; i < kept_count; ++i)
    for (Eigen::Index j = 0; j < kept_count; ++j) {
      std::complex<Scalar> c(0);
      for (const Eigen::Index t : toffs)
        c += rho.matrix()(koffs[static_cast<std::size_t>(i)] + t,
                          koffs[static_cast<std::size_t>(j)] + t);
      out(i, j) = c;
    }
  std::vector<int> kept_dims;
  kept_dims.reserve(keep.size());
  for (int k : keep) kept_dims.push_back(rho.dims()[static_cast<std::size_t>(k)]);
  return DensityMatrix<Scalar>(std::move(kept_dims), std::move(out));
}

template <typename Scalar>
DensityMatrix<Scalar> partial_trace(const DensityMatrix<Scalar>& rho,
                                    std::initializer_list<int> keep) {
  std::vector<int> k(keep);
  return partial_trace(rho, std::span<const int>(k));
}

// Entropy in bits. Eigenvalues in (-psd_tol, 0] clamp to zero; anything more
// negative means the input was not a density matrix and raises.
template <typename Scalar>
Scalar von_neumann_entropy(const DensityMatrix<Scalar>& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMat<Scalar>> es(rho.matrix(), Eigen::EigenvaluesOnly);
  Scalar h(0);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    Scalar lam = es.eigenvalues()(i);
    if (lam < -num_tol<Scalar>::psd)
      throw std::domain_error("von_neumann_entropy: negative eigenvalue");
    if (lam <= Scalar(0)) continue;
    h -= lam * std::log2(lam);
  }
  return h;
}

// ---------------------------------------------------------------------------
// comparison helpers

template <typename Scalar>
std::complex<Scalar> inner(const PureState<Scalar>& a, const PureState<Scalar>& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("inner: mismatched dims");
  return a.amplitudes().dot(b.amplitudes());  // conjugates a
}

template <typename Scalar>
bool states_equal_up_to_phase(const PureState<Scalar>& a, const PureState<Scalar>& b,
                              Scalar tol = num_tol<Scalar>::algebraic) {
  return std::abs(inner(a, b)) >= Scalar(1) - tol;
}

// Debug rendering; amplitudes as "[re, im]" pairs.
template <typename Scalar>
std::string to_string(const PureState<Scalar>& s) {
  std::string out = "dims[";
  for (std::size_t i = 0; i < s.dims().size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(s.dims()[i]);
  }
  out += "]";
  char buf[96];
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    std::snprintf(buf, sizeof buf, " [%.17g, %.17g]",
                  static_cast<double>(s.amp(i).real()),
                  static_cast<double>(s.amp(i).imag()));
    out += buf;
  }
  return out;
}

}  // namespace cqss
