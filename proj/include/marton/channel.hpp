#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "marton/pmf.hpp"
#include "marton/quantum.hpp"
#include "marton/rng.hpp"

namespace marton {

inline constexpr std::size_t kClassicalProductCap = 1'000'000;
inline constexpr std::size_t kQuantumDimCap = 1024;

// Broadcast channel p(y, z | x); transition(x) is a JointPmf with rows y and
// columns z.
class ClassicalBroadcastChannel {
 public:
  ClassicalBroadcastChannel(std::vector<std::string> x_alphabet,
                            std::vector<std::string> y_alphabet,
                            std::vector<std::string> z_alphabet,
                            std::vector<JointPmf> transitions);

  // p[x][y][z].
  static ClassicalBroadcastChannel from_tensor(
      std::vector<std::string> x_alphabet, std::vector<std::string> y_alphabet,
      std::vector<std::string> z_alphabet,
      const std::vector<std::vector<std::vector<double>>>& p);

  const std::vector<std::string>& x_alphabet() const { return x_; }
  const std::vector<std::string>& y_alphabet() const { return y_; }
  const std::vector<std::string>& z_alphabet() const { return z_; }
  std::size_t x_size() const { return x_.size(); }
  std::size_t y_size() const { return y_.size(); }
  std::size_t z_size() const { return z_.size(); }
  std::size_t index_of_x(const std::string& label) const;

  const JointPmf& transition(std::size_t x) const { return transitions_.at(x); }
  double p_y(std::size_t x, std::size_t y) const { return py_[x * y_.size() + y]; }
  double p_z(std::size_t x, std::size_t z) const { return pz_[x * z_.size() + z]; }

  std::pair<std::size_t, std::size_t> sample_output(std::size_t x, SeededRng& rng) const;
  std::pair<std::string, std::string> sample_output(const std::string& x,
                                                    SeededRng& rng) const;

 private:
  std::vector<std::string> x_, y_, z_;
  std::vector<JointPmf> transitions_;
  std::vector<double> py_, pz_;
};

// x -> rho_x on B (x) C.
class CqBroadcastChannel {
 public:
  CqBroadcastChannel(std::vector<std::string> x_alphabet, std::size_t dim_b,
                     std::size_t dim_c, std::vector<DensityOperator> states);

  const std::vector<std::string>& x_alphabet() const { return x_; }
  std::size_t x_size() const { return x_.size(); }
  std::size_t index_of_x(const std::string& label) const;
  std::size_t dim_b() const { return dim_b_; }
  std::size_t dim_c() const { return dim_c_; }
  const DensityOperator& state(std::size_t x) const { return states_.at(x); }
  const DensityOperator& bob_state(std::size_t x) const { return bob_.at(x); }
  const DensityOperator& charlie_state(std::size_t x) const { return charlie_.at(x); }

 private:
  std::vector<std::string> x_;
  std::size_t dim_b_, dim_c_;
  std::vector<DensityOperator> states_, bob_, charlie_;
};

// Joint law of the auxiliaries (U, V) and the map f: U x V -> X.
class InputDesign {
 public:
  static constexpr std::uint32_t kUnmapped = 0xffffffffu;

  // f is indexed u * |V| + v and holds indices into an X alphabet of size
  // x_size. Cells of zero mass may be kUnmapped.
  InputDesign(JointPmf uv, std::vector<std::uint32_t> f, std::size_t x_size);

  // f given by labels: "u,v" -> x.
  static InputDesign from_labels(JointPmf uv, const std::map<std::string, std::string>& f,
                                 const std::vector<std::string>& x_alphabet);

  const JointPmf& uv() const { return uv_; }
  std::size_t u_size() const { return uv_.rows(); }
  std::size_t v_size() const { return uv_.cols(); }
  std::size_t x_size() const { return x_size_; }
  std::uint32_t f(std::size_t u, std::size_t v) const { return f_[u * uv_.cols() + v]; }
  const std::vector<std::uint32_t>& f_table() const { return f_; }

 private:
  JointPmf uv_;
  std::vector<std::uint32_t> f_;
  std::size_t x_size_;
};

// rho^{UVBC} together with its register dimensions (U, V, B, C).
struct JointState {
  DensityOperator rho;
  std::array<std::size_t, 4> dims;
};

JointState build_joint_state(const CqBroadcastChannel& channel, const InputDesign& design);

// sum_u |u><u| (x) sum_v p(u, v) rho^B_{f(u,v)}, built without the full state.
DensityOperator build_ub_state(const CqBroadcastChannel& channel, const InputDesign& design);
DensityOperator build_vc_state(const CqBroadcastChannel& channel, const InputDesign& design);

// (p_UY, p_VZ).
std::pair<JointPmf, JointPmf> build_classical_joints(const ClassicalBroadcastChannel& channel,
                                                     const InputDesign& design);

// Labels of the n-fold product alphabet, first coordinate most significant.
std::vector<std::string> product_labels(const std::vector<std::string>& labels, std::size_t n);

ClassicalBroadcastChannel nfold(const ClassicalBroadcastChannel& channel, std::size_t n,
                                std::size_t cap = kClassicalProductCap);
CqBroadcastChannel nfold(const CqBroadcastChannel& channel, std::size_t n,
                         std::size_t cap = kQuantumDimCap);
InputDesign nfold(const InputDesign& design, std::size_t n,
                  std::size_t cap = kClassicalProductCap);

// Memoryless n-fold use of a classical channel without materializing it.
class ProductChannelView {
 public:
  ProductChannelView(const ClassicalBroadcastChannel& base, std::size_t n)
      : base_(&base), n_(n) {}

  const ClassicalBroadcastChannel& base() const { return *base_; }
  std::size_t n() const { return n_; }

  template <class Sym>
  void sample_output(const Sym* x, SeededRng& rng, Sym* y, Sym* z) const {
    for (std::size_t t = 0; t < n_; ++t) {
      auto [yy, zz] = base_->sample_output(x[t], rng);
      y[t] = static_cast<Sym>(yy);
      z[t] = static_cast<Sym>(zz);
    }
  }

  double p_y(std::span<const std::size_t> x, std::span<const std::size_t> y) const;

 private:
  const ClassicalBroadcastChannel* base_;
  std::size_t n_;
};

}  // namespace marton
