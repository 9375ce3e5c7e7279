#include "marton/channel.hpp"

#include <algorithm>
#include <limits>

#include "marton/error.hpp"

namespace marton {

namespace {

std::size_t find_label(const std::vector<std::string>& labels, const std::string& label,
                       const char* what) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw InvalidArgument(std::string("unknown ") + what + " symbol '" + label + "'");
  }
  return static_cast<std::size_t>(it - labels.begin());
}

void check_unique(const std::vector<std::string>& labels, const char* what) {
  if (labels.empty()) throw InvalidArgument(std::string(what) + " alphabet is empty");
  auto sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument(std::string(what) + " alphabet has duplicate labels");
  }
}

std::size_t checked_power(std::size_t base, std::size_t n, std::size_t cap, const char* what) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (out > cap / std::max<std::size_t>(base, 1)) {
      throw CapExceeded(std::string(what) + " of the " + std::to_string(n) +
                        "-fold product exceeds cap " + std::to_string(cap));
    }
    out *= base;
  }
  return out;
}

// Digits of i in base `base`, most significant first.
void digits(std::size_t i, std::size_t base, std::size_t n, std::vector<std::size_t>& out) {
  out.assign(n, 0);
  for (std::size_t t = n; t-- > 0;) {
    out[t] = i % base;
    i /= base;
  }
}

}  // namespace

ClassicalBroadcastChannel::ClassicalBroadcastChannel(std::vector<std::string> x_alphabet,
                                                     std::vector<std::string> y_alphabet,
                                                     std::vector<std::string> z_alphabet,
                                                     std::vector<JointPmf> transitions)
    : x_(std::move(x_alphabet)),
      y_(std::move(y_alphabet)),
      z_(std::move(z_alphabet)),
      transitions_(std::move(transitions)) {
  check_unique(x_, "x");
  check_unique(y_, "y");
  check_unique(z_, "z");
  if (transitions_.size() != x_.size()) {
    throw InvalidArgument("channel needs one transition per input symbol");
  }
  py_.assign(x_.size() * y_.size(), 0.0);
  pz_.assign(x_.size() * z_.size(), 0.0);
  for (std::size_t x = 0; x < x_.size(); ++x) {
    const JointPmf& t = transitions_[x];
    if (t.rows() != y_.size() || t.cols() != z_.size()) {
      throw InvalidArgument("transition for x = '" + x_[x] + "' has wrong shape");
    }
    for (std::size_t y = 0; y < y_.size(); ++y) py_[x * y_.size() + y] = t.row_marginal()[y];
    for (std::size_t z = 0; z < z_.size(); ++z) pz_[x * z_.size() + z] = t.col_marginal()[z];
  }
}

ClassicalBroadcastChannel ClassicalBroadcastChannel::from_tensor(
    std::vector<std::string> x_alphabet, std::vector<std::string> y_alphabet,
    std::vector<std::string> z_alphabet,
    const std::vector<std::vector<std::vector<double>>>& p) {
  if (p.size() != x_alphabet.size()) {
    throw InvalidArgument("transition tensor has " + std::to_string(p.size()) +
                          " slices for " + std::to_string(x_alphabet.size()) + " inputs");
  }
  std::vector<JointPmf> slices;
  for (std::size_t x = 0; x < p.size(); ++x) {
    try {
      slices.emplace_back(y_alphabet, z_alphabet, p[x]);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("transition for x = '" + x_alphabet[x] + "': " + e.what());
    }
  }
  return ClassicalBroadcastChannel(std::move(x_alphabet), std::move(y_alphabet),
                                   std::move(z_alphabet), std::move(slices));
}

std::size_t ClassicalBroadcastChannel::index_of_x(const std::string& label) const {
  return find_label(x_, label, "x");
}

std::pair<std::size_t, std::size_t> ClassicalBroadcastChannel::sample_output(
    std::size_t x, SeededRng& rng) const {
  const JointPmf& t = transitions_.at(x);
  std::size_t cell = t.sample_cell(rng);
  return {cell / t.cols(), cell % t.cols()};
}

std::pair<std::string, std::string> ClassicalBroadcastChannel::sample_output(
    const std::string& x, SeededRng& rng) const {
  auto [y, z] = sample_output(index_of_x(x), rng);
  return {y_[y], z_[z]};
}

double ProductChannelView::p_y(std::span<const std::size_t> x,
                               std::span<const std::size_t> y) const {
  if (x.size() != n_ || y.size() != n_) throw InvalidArgument("sequence length mismatch");
  double p = 1.0;
  for (std::size_t t = 0; t < n_; ++t) p *= base_->p_y(x[t], y[t]);
  return p;
}

CqBroadcastChannel::CqBroadcastChannel(std::vector<std::string> x_alphabet, std::size_t dim_b,
                                       std::size_t dim_c, std::vector<DensityOperator> states)
    : x_(std::move(x_alphabet)), dim_b_(dim_b), dim_c_(dim_c), states_(std::move(states)) {
  check_unique(x_, "x");
  if (states_.size() != x_.size()) {
    throw InvalidArgument("cq channel needs one state per input symbol");
  }
  if (dim_b_ == 0 || dim_c_ == 0) throw InvalidArgument("output dimensions must be positive");
  const std::array<std::size_t, 2> dims{dim_b_, dim_c_};
  const std::array<std::size_t, 1> keep_b{0}, keep_c{1};
  for (std::size_t x = 0; x < x_.size(); ++x) {
    if (states_[x].dim() != dim_b_ * dim_c_) {
      throw InvalidArgument("state for x = '" + x_[x] + "' has dimension " +
                            std::to_string(states_[x].dim()) + ", expected " +
                            std::to_string(dim_b_ * dim_c_));
    }
    bob_.push_back(partial_trace(states_[x], dims, keep_b));
    charlie_.push_back(partial_trace(states_[x], dims, keep_c));
  }
}

std::size_t CqBroadcastChannel::index_of_x(const std::string& label) const {
  return find_label(x_, label, "x");
}

InputDesign::InputDesign(JointPmf uv, std::vector<std::uint32_t> f, std::size_t x_size)
    : uv_(std::move(uv)), f_(std::move(f)), x_size_(x_size) {
  if (f_.size() != uv_.cells()) throw InvalidArgument("f must have one entry per (u, v) cell");
  if (x_size_ == 0) throw InvalidArgument("x alphabet is empty");
  for (std::size_t u = 0; u < uv_.rows(); ++u) {
    for (std::size_t v = 0; v < uv_.cols(); ++v) {
      std::uint32_t x = f_[u * uv_.cols() + v];
      if (x == kUnmapped) {
        if (uv_(u, v) > 0.0) {
          throw InvalidArgument("f is undefined at (" + uv_.row_labels()[u] + "," +
                                uv_.col_labels()[v] + ") which has positive mass");
        }
        continue;
      }
      if (x >= x_size_) throw InvalidArgument("f maps outside the x alphabet");
    }
  }
}

InputDesign InputDesign::from_labels(JointPmf uv, const std::map<std::string, std::string>& f,
                                     const std::vector<std::string>& x_alphabet) {
  std::vector<std::uint32_t> table(uv.cells(), kUnmapped);
  for (const auto& [key, x] : f) {
    auto comma = key.find(',');
    if (comma == std::string::npos) {
      throw InvalidArgument("f key '" + key + "' is not of the form u,v");
    }
    std::size_t u = uv.row_marginal().index_of(key.substr(0, comma));
    std::size_t v = uv.col_marginal().index_of(key.substr(comma + 1));
    table[u * uv.cols() + v] = static_cast<std::uint32_t>(find_label(x_alphabet, x, "x"));
  }
  return InputDesign(std::move(uv), std::move(table), x_alphabet.size());
}

JointState build_joint_state(const CqBroadcastChannel& channel, const InputDesign& design) {
  if (design.x_size() != channel.x_size()) {
    throw InvalidArgument("design and channel disagree on the x alphabet size");
  }
  const std::size_t du = design.u_size(), dv = design.v_size();
  const std::size_t dbc = channel.dim_b() * channel.dim_c();
  const std::size_t total = du * dv * dbc;
  if (total > kQuantumDimCap) {
    throw CapExceeded("joint state dimension " + std::to_string(total) + " exceeds cap " +
                      std::to_string(kQuantumDimCap));
  }
  const auto t = static_cast<Eigen::Index>(total);
  const auto b = static_cast<Eigen::Index>(dbc);
  ComplexMatrix rho = ComplexMatrix::Zero(t, t);
  for (std::size_t u = 0; u < du; ++u) {
    for (std::size_t v = 0; v < dv; ++v) {
      double p = design.uv()(u, v);
      if (p <= 0.0) continue;
      auto off = static_cast<Eigen::Index>((u * dv + v) * dbc);
      rho.block(off, off, b, b) = p * channel.state(design.f(u, v)).matrix();
    }
  }
  return {DensityOperator(rho), {du, dv, channel.dim_b(), channel.dim_c()}};
}

namespace {

DensityOperator build_marginal_cq(const CqBroadcastChannel& channel, const InputDesign& design,
                                  bool bob) {
  if (design.x_size() != channel.x_size()) {
    throw InvalidArgument("design and channel disagree on the x alphabet size");
  }
  const std::size_t outer = bob ? design.u_size() : design.v_size();
  const std::size_t inner = bob ? design.v_size() : design.u_size();
  const std::size_t d = bob ? channel.dim_b() : channel.dim_c();
  const auto di = static_cast<Eigen::Index>(d);
  ComplexMatrix rho = ComplexMatrix::Zero(static_cast<Eigen::Index>(outer * d),
                                          static_cast<Eigen::Index>(outer * d));
  for (std::size_t a = 0; a < outer; ++a) {
    auto off = static_cast<Eigen::Index>(a * d);
    for (std::size_t b = 0; b < inner; ++b) {
      std::size_t u = bob ? a : b, v = bob ? b : a;
      double p = design.uv()(u, v);
      if (p <= 0.0) continue;
      std::uint32_t x = design.f(u, v);
      const auto& st = bob ? channel.bob_state(x) : channel.charlie_state(x);
      rho.block(off, off, di, di) += p * st.matrix();
    }
  }
  return DensityOperator(rho);
}

}  // namespace

DensityOperator build_ub_state(const CqBroadcastChannel& channel, const InputDesign& design) {
  return build_marginal_cq(channel, design, true);
}

DensityOperator build_vc_state(const CqBroadcastChannel& channel, const InputDesign& design) {
  return build_marginal_cq(channel, design, false);
}

std::pair<JointPmf, JointPmf> build_classical_joints(const ClassicalBroadcastChannel& channel,
                                                     const InputDesign& design) {
  if (design.x_size() != channel.x_size()) {
    throw InvalidArgument("design and channel disagree on the x alphabet size");
  }
  const std::size_t nu = design.u_size(), nv = design.v_size();
  const std::size_t ny = channel.y_size(), nz = channel.z_size();
  std::vector<double> uy(nu * ny, 0.0), vz(nv * nz, 0.0);
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t v = 0; v < nv; ++v) {
      double p = design.uv()(u, v);
      if (p <= 0.0) continue;
      std::uint32_t x = design.f(u, v);
      for (std::size_t y = 0; y < ny; ++y) uy[u * ny + y] += p * channel.p_y(x, y);
      for (std::size_t z = 0; z < nz; ++z) vz[v * nz + z] += p * channel.p_z(x, z);
    }
  }
  return {JointPmf(design.uv().row_labels(), channel.y_alphabet(), uy, 1e-9),
          JointPmf(design.uv().col_labels(), channel.z_alphabet(), vz, 1e-9)};
}

std::vector<std::string> product_labels(const std::vector<std::string>& labels, std::size_t n) {
  bool single = std::all_of(labels.begin(), labels.end(),
                            [](const std::string& s) { return s.size() == 1; });
  std::size_t count = checked_power(labels.size(), n, kClassicalProductCap * 16, "alphabet");
  std::vector<std::string> out;
  out.reserve(count);
  std::vector<std::size_t> d;
  for (std::size_t i = 0; i < count; ++i) {
    digits(i, labels.size(), n, d);
    std::string s;
    for (std::size_t t = 0; t < n; ++t) {
      if (t > 0 && !single) s += '|';
      s += labels[d[t]];
    }
    out.push_back(std::move(s));
  }
  return out;
}

ClassicalBroadcastChannel nfold(const ClassicalBroadcastChannel& channel, std::size_t n,
                                std::size_t cap) {
  if (n == 0) throw InvalidArgument("block length must be positive");
  if (n == 1) return channel;
  const std::size_t nx = checked_power(channel.x_size(), n, cap, "input alphabet");
  const std::size_t ny = checked_power(channel.y_size(), n, cap, "y alphabet");
  const std::size_t nz = checked_power(channel.z_size(), n, cap, "z alphabet");
  if (ny * nz > cap || nx > cap / (ny * nz)) {
    throw CapExceeded("dense " + std::to_string(n) + "-fold transition exceeds cap " +
                      std::to_string(cap));
  }
  std::vector<JointPmf> slices;
  std::vector<std::size_t> dx, dy, dz;
  for (std::size_t x = 0; x < nx; ++x) {
    digits(x, channel.x_size(), n, dx);
    std::vector<double> probs(ny * nz);
    for (std::size_t y = 0; y < ny; ++y) {
      digits(y, channel.y_size(), n, dy);
      for (std::size_t z = 0; z < nz; ++z) {
        digits(z, channel.z_size(), n, dz);
        double p = 1.0;
        for (std::size_t t = 0; t < n && p > 0.0; ++t) p *= channel.transition(dx[t])(dy[t], dz[t]);
        probs[y * nz + z] = p;
      }
    }
    slices.emplace_back(product_labels(channel.y_alphabet(), n),
                        product_labels(channel.z_alphabet(), n), std::move(probs), 1e-9);
  }
  return ClassicalBroadcastChannel(product_labels(channel.x_alphabet(), n),
                                   product_labels(channel.y_alphabet(), n),
                                   product_labels(channel.z_alphabet(), n), std::move(slices));
}

CqBroadcastChannel nfold(const CqBroadcastChannel& channel, std::size_t n, std::size_t cap) {
  if (n == 0) throw InvalidArgument("block length must be positive");
  if (n == 1) return channel;
  const std::size_t db = checked_power(channel.dim_b(), n, cap, "B dimension");
  const std::size_t dc = checked_power(channel.dim_c(), n, cap, "C dimension");
  if (db * dc > cap) {
    throw CapExceeded("output dimension " + std::to_string(db * dc) + " exceeds cap " +
                      std::to_string(cap));
  }
  const std::size_t nx = checked_power(channel.x_size(), n, kClassicalProductCap, "input alphabet");
  // B1 C1 B2 C2 ... -> B1 ... Bn C1 ... Cn
  std::vector<std::size_t> dims, perm;
  for (std::size_t t = 0; t < n; ++t) {
    dims.push_back(channel.dim_b());
    dims.push_back(channel.dim_c());
  }
  for (std::size_t t = 0; t < n; ++t) perm.push_back(2 * t);
  for (std::size_t t = 0; t < n; ++t) perm.push_back(2 * t + 1);
  std::vector<DensityOperator> states;
  std::vector<std::size_t> dx;
  for (std::size_t x = 0; x < nx; ++x) {
    digits(x, channel.x_size(), n, dx);
    ComplexMatrix m = channel.state(dx[0]).matrix();
    for (std::size_t t = 1; t < n; ++t) m = kron(m, channel.state(dx[t]).matrix());
    states.emplace_back(permute_subsystems(m, dims, perm));
  }
  return CqBroadcastChannel(product_labels(channel.x_alphabet(), n), db, dc, std::move(states));
}

InputDesign nfold(const InputDesign& design, std::size_t n, std::size_t cap) {
  if (n == 0) throw InvalidArgument("block length must be positive");
  if (n == 1) return design;
  const std::size_t nu = checked_power(design.u_size(), n, cap, "U alphabet");
  const std::size_t nv = checked_power(design.v_size(), n, cap, "V alphabet");
  if (nu * nv > cap) throw CapExceeded("product design exceeds cap " + std::to_string(cap));
  checked_power(design.x_size(), n, std::numeric_limits<std::uint32_t>::max() - 1, "x alphabet");
  std::vector<double> probs(nu * nv);
  std::vector<std::uint32_t> f(nu * nv, InputDesign::kUnmapped);
  std::vector<std::size_t> du, dv;
  for (std::size_t u = 0; u < nu; ++u) {
    digits(u, design.u_size(), n, du);
    for (std::size_t v = 0; v < nv; ++v) {
      digits(v, design.v_size(), n, dv);
      double p = 1.0;
      std::size_t x = 0;
      bool mapped = true;
      for (std::size_t t = 0; t < n; ++t) {
        p *= design.uv()(du[t], dv[t]);
        std::uint32_t xt = design.f(du[t], dv[t]);
        if (xt == InputDesign::kUnmapped) mapped = false;
        x = x * design.x_size() + (mapped ? xt : 0);
      }
      probs[u * nv + v] = p;
      if (mapped) f[u * nv + v] = static_cast<std::uint32_t>(x);
    }
  }
  std::size_t nx = 1;
  for (std::size_t t = 0; t < n; ++t) nx *= design.x_size();
  JointPmf uv(product_labels(design.uv().row_labels(), n),
              product_labels(design.uv().col_labels(), n), std::move(probs), 1e-9);
  return InputDesign(std::move(uv), std::move(f), nx);
}

}  // namespace marton
