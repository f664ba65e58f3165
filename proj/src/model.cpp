#include "smid/model.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "smid/errors.hpp"

namespace smid {

ModelOrder::ModelOrder(int n_a, int n_b) : n_a_(n_a), n_b_(n_b) {
    if (n_a < 1 || n_b < 0 || n_a < n_b) {
        throw ConfigError("invalid model order n_a=" + std::to_string(n_a) + ", n_b=" + std::to_string(n_b) +
                          " (need n_a >= 1, n_b >= 0, n_a >= n_b)");
    }
}

std::string ModelOrder::param_name(int k) const {
    if (k < n_a_) return "a" + std::to_string(k + 1);
    return "b" + std::to_string(k - n_a_);
}

int ModelOrder::param_index(const std::string& name) const {
    for (int k = 0; k < n_params(); ++k) {
        if (param_name(k) == name) return k;
    }
    throw ConfigError("unknown parameter '" + name + "' for order n_a=" + std::to_string(n_a_) +
                      ", n_b=" + std::to_string(n_b_));
}

ParameterTrajectory ParameterTrajectory::constant(double value) {
    if (!std::isfinite(value)) throw ConfigError("constant parameter must be finite");
    return {Kind::Constant, value, 0.0, 1.0};
}

ParameterTrajectory ParameterTrajectory::sinusoid(double offset, double amplitude, double period) {
    if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("sinusoid period must be positive");
    if (!std::isfinite(amplitude) || !std::isfinite(offset)) throw ConfigError("sinusoid terms must be finite");
    return {Kind::Sinusoid, offset, amplitude, period};
}

double ParameterTrajectory::at(long t) const {
    if (kind_ == Kind::Constant) return offset_;
    return offset_ + amplitude_ * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period_);
}

double variation_bound_of(const ParameterTrajectory& trajectory) {
    if (trajectory.kind() == ParameterTrajectory::Kind::Constant) return 0.0;
    return 2.0 * std::numbers::pi * std::abs(trajectory.amplitude()) / trajectory.period();
}

std::vector<double> variation_bounds_of(std::span<const ParameterTrajectory> trajectories) {
    std::vector<double> out;
    out.reserve(trajectories.size());
    for (const auto& tr : trajectories) out.push_back(variation_bound_of(tr));
    return out;
}

ParameterVector Dataset::theta_at(long t) const {
    if (t < 1 || t > size()) throw std::out_of_range("theta_at: t outside 1..N");
    return {theta[static_cast<std::size_t>(t - 1)], t};
}

namespace {

class UnitStream {
public:
    UnitStream(std::uint64_t seed, std::uint32_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
        engine_.seed(seq);
    }
    // [0, 1) with 53 random bits.
    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

constexpr std::uint32_t kInputStream = 1;
constexpr std::uint32_t kEtaStream = 2;
constexpr std::uint32_t kZetaStream = 3;

std::vector<double> symmetric_noise(long n, double delta, std::uint64_t seed, std::uint32_t stream) {
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    if (delta == 0.0) return out;
    UnitStream rng(seed, stream);
    for (auto& v : out) v = delta * (2.0 * rng.next() - 1.0);
    return out;
}

}  // namespace

std::vector<double> uniform_sequence(long n, double lo, double hi, std::uint64_t seed) {
    if (n < 0 || !(lo <= hi)) throw ConfigError("uniform_sequence: need n >= 0 and lo <= hi");
    UnitStream rng(seed, kInputStream);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out) v = lo + (hi - lo) * rng.next();
    return out;
}

Dataset simulate(std::span<const ParameterTrajectory> trajectories, ModelOrder order, const NoiseSpec& noise,
                 const InputSpec& input, long n) {
    const auto x = uniform_sequence(n, input.lo, input.hi, input.seed);
    return simulate(trajectories, order, noise, x);
}

Dataset simulate(std::span<const ParameterTrajectory> trajectories, ModelOrder order, const NoiseSpec& noise,
                 std::span<const double> x) {
    const int np = order.n_params();
    const long n = static_cast<long>(x.size());
    if (static_cast<int>(trajectories.size()) != np) {
        throw ConfigError("expected " + std::to_string(np) + " parameter trajectories, got " +
                          std::to_string(trajectories.size()));
    }
    if (n <= std::max(order.n_a(), order.n_b())) throw ConfigError("simulation length must exceed max(n_a, n_b)");
    if (!(noise.delta_eta >= 0.0) || !(noise.delta_zeta >= 0.0)) throw ConfigError("noise bounds must be >= 0");

    Dataset d(order);
    d.x.assign(x.begin(), x.end());
    d.w.assign(static_cast<std::size_t>(n), 0.0);
    d.theta.reserve(static_cast<std::size_t>(n));

    for (long t = 1; t <= n; ++t) {
        std::vector<double> th(static_cast<std::size_t>(np));
        for (int k = 0; k < np; ++k) th[static_cast<std::size_t>(k)] = trajectories[static_cast<std::size_t>(k)].at(t);

        double wt = 0.0;
        for (int i = 1; i <= order.n_a(); ++i) wt -= th[static_cast<std::size_t>(order.index_a(i))] * d.w_at(t - i);
        for (int j = 0; j <= order.n_b(); ++j) wt += th[static_cast<std::size_t>(order.index_b(j))] * d.x_at(t - j);
        if (!std::isfinite(wt) || std::abs(wt) > kDivergenceCap) throw UnstableTrajectory(t, std::abs(wt));

        d.w[static_cast<std::size_t>(t - 1)] = wt;
        d.theta.push_back(std::move(th));
    }

    d.eta = symmetric_noise(n, noise.delta_eta, noise.seed, kEtaStream);
    d.zeta = symmetric_noise(n, noise.delta_zeta, noise.seed, kZetaStream);
    d.u.resize(static_cast<std::size_t>(n));
    d.y.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
        d.u[i] = d.x[i] + d.zeta[i];
        d.y[i] = d.w[i] + d.eta[i];
    }
    return d;
}

namespace {
double energy(std::span<const double> s) {
    double e = 0.0;
    for (double v : s) e += v * v;
    return e;
}
}  // namespace

double snr_db(std::span<const double> signal, std::span<const double> noise) {
    const double en = energy(noise);
    if (en == 0.0) return kInfiniteSnr;
    return 10.0 * std::log10(energy(signal) / en);
}

double snr_input(const Dataset& d) { return snr_db(d.x, d.zeta); }
double snr_output(const Dataset& d) { return snr_db(d.w, d.eta); }

double delta_for_snr(std::span<const double> signal, double target_snr_db) {
    const double es = energy(signal);
    if (signal.empty() || !(es > 0.0)) throw ConfigError("delta_for_snr: signal energy must be positive");
    if (std::isinf(target_snr_db) && target_snr_db > 0) return 0.0;
    const double n = static_cast<double>(signal.size());
    return std::sqrt(3.0 * es / (n * std::pow(10.0, target_snr_db / 10.0)));
}

}  // namespace smid
