#include "stochtube/langevin.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

#include "stochtube/error.hpp"

namespace stochtube {
namespace {

constexpr std::size_t kBlock = 512;

simd::DriftParams drift_params(const Flow& flow) {
  simd::DriftParams d;
  if (const SystemSpec* s = flow.system()) {
    switch (s->kind) {
      case SystemKind::HopfCircle:
        d.kind = simd::DriftParams::Kind::Hopf;
        d.p[0] = s->lambda;
        d.p[1] = s->r_c;
        d.p[2] = s->omega;
        break;
      case SystemKind::VanDerPol:
        d.kind = simd::DriftParams::Kind::VanDerPol;
        d.p[0] = s->mu;
        d.p[1] = s->b;
        d.p[2] = s->omega0;
        break;
      case SystemKind::Rayleigh:
        d.kind = simd::DriftParams::Kind::Rayleigh;
        d.p[0] = s->mu;
        d.p[1] = s->b;
        d.p[2] = s->omega0;
        break;
    }
  } else {
    const Mat2& a = flow.linear_field()->a;
    d.kind = simd::DriftParams::Kind::Linear;
    d.p[0] = a.a11;
    d.p[1] = a.a12;
    d.p[2] = a.a21;
    d.p[3] = a.a22;
  }
  return d;
}

std::size_t steps_for(double t, double dt) {
  return static_cast<std::size_t>(std::llround(t / dt));
}

}  // namespace

unsigned default_threads() {
  if (const char* env = std::getenv("STOCHTUBE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void EnsembleConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidArgument, m); };
  if (n_traj < 1) fail("n_traj must be >= 1");
  if (!(dt > 0.0)) fail("dt must be > 0");
  if (!(t_end >= dt)) fail("t_end must be >= dt");
  const double b = burn_in_time();
  if (!(b >= 0.0) || !(b < t_end)) fail("burn_in must satisfy 0 <= burn_in < t_end");
  if (!(noise.two_d >= 0.0)) fail("noise two_d must be >= 0");
  if (!(thin >= 0.0)) fail("thin must be >= 0");
  if (flow.is_reversed()) fail("ensemble drift must be a forward flow");
  if (!start.finite()) fail("start state must be finite");
  if (const SystemSpec* s = flow.system()) s->validate();
}

EnsembleStats simulate_ensemble(const EnsembleConfig& cfg) {
  cfg.validate();
  const simd::Kernels& k = cfg.kernels ? *cfg.kernels : simd::active();
  const simd::DriftParams drift = drift_params(cfg.flow);
  const std::size_t n_steps = std::max<std::size_t>(1, steps_for(cfg.t_end, cfg.dt));
  const std::size_t burn_steps = std::min(steps_for(cfg.burn_in_time(), cfg.dt), n_steps - 1);
  const std::size_t span = n_steps - burn_steps;

  std::size_t thin_steps = 1;
  if (cfg.thin > 0.0) {
    thin_steps = std::max<std::size_t>(1, steps_for(cfg.thin, cfg.dt));
  } else {
    const std::size_t budget = std::max<std::size_t>(1, cfg.max_samples / cfg.n_traj);
    while (span / thin_steps + 1 > budget) ++thin_steps;
  }
  const std::size_t per_traj = span / thin_steps + 1;
  const double scale = std::sqrt(cfg.noise.two_d * cfg.dt);

  EnsembleStats out;
  out.n_traj = cfg.n_traj;
  out.per_traj = per_traj;
  out.thin = static_cast<double>(thin_steps) * cfg.dt;
  out.samples.resize(cfg.n_traj * per_traj);

  const std::size_t n_blocks = (cfg.n_traj + kBlock - 1) / kBlock;
  std::atomic<std::size_t> next_block{0};
  std::mutex fail_mu;
  std::size_t failed_traj = std::numeric_limits<std::size_t>::max();
  double failed_time = 0.0;

  auto worker = [&]() {
    std::vector<double> x(kBlock), y(kBlock), gx(kBlock), gy(kBlock);
    for (std::size_t blk = next_block++; blk < n_blocks; blk = next_block++) {
      const std::size_t first = blk * kBlock;
      const std::size_t count = std::min(kBlock, cfg.n_traj - first);
      std::fill_n(x.begin(), count, cfg.start.x);
      std::fill_n(y.begin(), count, cfg.start.y);

      auto retain = [&](std::size_t step) -> bool {
        const std::size_t j = (step - burn_steps) / thin_steps;
        for (std::size_t i = 0; i < count; ++i) {
          if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            std::lock_guard lock(fail_mu);
            if (first + i < failed_traj) {
              failed_traj = first + i;
              failed_time = static_cast<double>(step) * cfg.dt;
            }
            return false;
          }
          out.samples[(first + i) * per_traj + j] = State{x[i], y[i]};
        }
        return true;
      };

      bool ok = true;
      if (burn_steps == 0) ok = retain(0);
      for (std::size_t step = 1; ok && step <= n_steps; ++step) {
        k.normals(cfg.seed, first, step, count, gx.data(), gy.data());
        k.em_step(drift, cfg.dt, scale, count, x.data(), y.data(), gx.data(), gy.data());
        if (step >= burn_steps && (step - burn_steps) % thin_steps == 0) ok = retain(step);
      }
    }
  };

  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(cfg.threads ? cfg.threads : default_threads(), n_blocks));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failed_traj != std::numeric_limits<std::size_t>::max()) {
    std::ostringstream msg;
    msg << "trajectory " << failed_traj << " diverged by t=" << failed_time;
    throw Error(ErrorKind::NonFinite, msg.str());
  }

  // Reductions in fixed trajectory-major order.
  const double r_ref = cfg.flow.system() && cfg.flow.system()->kind == SystemKind::HopfCircle
                           ? cfg.flow.system()->r_c
                           : 0.0;
  const auto n_samples = static_cast<double>(out.samples.size());
  double sum_r = 0.0, sum_x = 0.0, sum_y = 0.0;
  for (const State& s : out.samples) {
    sum_r += std::hypot(s.x, s.y) - r_ref;
    sum_x += s.x;
    sum_y += s.y;
  }
  const double mean_r = sum_r / n_samples;
  const double mean_x = sum_x / n_samples;
  const double mean_y = sum_y / n_samples;
  double ss_r = 0.0, ss_x = 0.0, ss_y = 0.0;
  double sum_v = 0.0, sum_v2 = 0.0;
  for (std::size_t t = 0; t < cfg.n_traj; ++t) {
    double ss_traj = 0.0;
    for (std::size_t j = 0; j < per_traj; ++j) {
      const State& s = out.samples[t * per_traj + j];
      const double dr = std::hypot(s.x, s.y) - r_ref - mean_r;
      ss_traj += dr * dr;
      ss_x += (s.x - mean_x) * (s.x - mean_x);
      ss_y += (s.y - mean_y) * (s.y - mean_y);
    }
    ss_r += ss_traj;
    const double v = ss_traj / static_cast<double>(per_traj);
    sum_v += v;
    sum_v2 += v * v;
  }
  out.radial_mean = mean_r;
  out.radial_variance = ss_r / n_samples;
  out.var_x = ss_x / n_samples;
  out.var_y = ss_y / n_samples;
  const auto nt = static_cast<double>(cfg.n_traj);
  if (cfg.n_traj > 1) {
    const double mv = sum_v / nt;
    const double var_v = std::max(0.0, (sum_v2 - nt * mv * mv) / (nt - 1.0));
    out.radial_variance_stderr = std::sqrt(var_v / nt);
  }
  return out;
}

CycleLocator::CycleLocator(const CycleInfo& cycle, std::size_t max_points, const simd::Kernels* kernels)
    : k_(kernels ? kernels : &simd::active()) {
  const auto& st = cycle.samples.states;
  if (st.size() < 3 || !(cycle.period > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "cycle needs at least 3 samples");
  }
  const std::size_t n = st.size() - 1;  // last sample closes the loop
  const std::size_t stride = std::max<std::size_t>(1, (n + std::max<std::size_t>(max_points, 3) - 1) /
                                                          std::max<std::size_t>(max_points, 3));
  std::vector<State> pts;
  std::vector<double> ph;
  for (std::size_t i = 0; i < n; i += stride) {
    pts.push_back(st[i]);
    ph.push_back(cycle.samples.times[i] / cycle.period);
  }
  build(pts, ph);
}

CycleLocator::CycleLocator(std::span<const State> closed_points, std::span<const double> phases,
                           const simd::Kernels* kernels)
    : k_(kernels ? kernels : &simd::active()) {
  if (closed_points.size() < 3 || phases.size() != closed_points.size()) {
    throw Error(ErrorKind::InvalidArgument, "locator needs >= 3 points with matching phases");
  }
  build(closed_points, phases);
}

void CycleLocator::build(std::span<const State> pts, std::span<const double> phases) {
  xs_.reserve(pts.size());
  ys_.reserve(pts.size());
  for (const State& p : pts) {
    xs_.push_back(p.x);
    ys_.push_back(p.y);
  }
  phase_.assign(phases.begin(), phases.end());
  phase_.push_back(1.0);
}

CycleProjection CycleLocator::project(State p) const {
  const std::size_t n = xs_.size();
  const std::size_t i = k_->nearest(p.x, p.y, xs_.data(), ys_.data(), n);

  CycleProjection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const std::size_t seg : {(i + n - 1) % n, i}) {
    const std::size_t j = (seg + 1) % n;
    const State a{xs_[seg], ys_[seg]};
    const State b{xs_[j], ys_[j]};
    const State d = b - a;
    const double len2 = dot(d, d);
    double tau = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
    tau = std::clamp(tau, 0.0, 1.0);
    const State foot = a + tau * d;
    const State off = p - foot;
    const double d2 = dot(off, off);
    if (d2 < best_d2) {
      best_d2 = d2;
      const double len = std::sqrt(len2);
      const State nl = len > 0.0 ? State{-d.y / len, d.x / len} : State{0.0, 0.0};
      best.segment = seg;
      best.tau = tau;
      best.offset = dot(off, nl);
      best.phase = phase_[seg] + tau * (phase_[seg + 1] - phase_[seg]);
    }
  }
  return best;
}

std::vector<SectionStat> section_statistics(std::span<const State> samples, const CycleInfo& cycle,
                                            std::size_t n_sections, std::size_t min_count) {
  if (n_sections < 4) throw Error(ErrorKind::InvalidArgument, "n_sections must be >= 4");
  const CycleLocator loc(cycle);
  std::vector<SectionStat> out(n_sections);
  std::vector<double> m2(n_sections, 0.0);
  for (std::size_t s = 0; s < n_sections; ++s) {
    out[s].phase_begin = static_cast<double>(s) / static_cast<double>(n_sections);
    out[s].phase_end = static_cast<double>(s + 1) / static_cast<double>(n_sections);
  }
  for (const State& p : samples) {
    const CycleProjection pr = loc.project(p);
    const auto bin = std::min(n_sections - 1,
                              static_cast<std::size_t>(pr.phase * static_cast<double>(n_sections)));
    SectionStat& st = out[bin];
    ++st.count;
    const double delta = pr.offset - st.mean;
    st.mean += delta / static_cast<double>(st.count);
    m2[bin] += delta * (pr.offset - st.mean);
  }
  for (std::size_t s = 0; s < n_sections; ++s) {
    if (out[s].count < min_count) {
      std::ostringstream msg;
      msg << "section " << s << " received " << out[s].count << " samples (< " << min_count << ")";
      throw Error(ErrorKind::EmptyBin, msg.str());
    }
    out[s].variance = m2[s] / static_cast<double>(out[s].count);
  }
  return out;
}

std::vector<double> tube_section_variance(const TubeProfile& profile, std::size_t n_sections) {
  if (n_sections < 1 || profile.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "need a non-empty profile and >= 1 section");
  }
  std::vector<double> sum(n_sections, 0.0);
  std::vector<std::size_t> cnt(n_sections, 0);
  for (std::size_t k = 0; k + 1 < profile.size(); ++k) {
    const double phase = profile.times[k] / profile.period;
    const auto bin = std::min(n_sections - 1,
                              static_cast<std::size_t>(phase * static_cast<double>(n_sections)));
    sum[bin] += profile.normal_variances[k];
    ++cnt[bin];
  }
  for (std::size_t s = 0; s < n_sections; ++s) {
    if (cnt[s] == 0) throw Error(ErrorKind::EmptyBin, "tube profile too coarse for the section count");
    sum[s] /= static_cast<double>(cnt[s]);
  }
  return sum;
}

}  // namespace stochtube
