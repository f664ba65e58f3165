#pragma once

// LTV errors-in-variables system model:
//
//   A(t, q^-1) w(t) = B(t, q^-1) x(t)
//   u(t) = x(t) + zeta(t),   y(t) = w(t) + eta(t)
//
// with theta(t) = [a_1 .. a_na, b_0 .. b_nb]. Samples are indexed t = 1..N;
// every signal is zero for t <= 0.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace smid {

class ModelOrder {
public:
    ModelOrder(int n_a, int n_b);

    int n_a() const noexcept { return n_a_; }
    int n_b() const noexcept { return n_b_; }
    int n_params() const noexcept { return n_a_ + n_b_ + 1; }
    /// First time index with a complete regressor window.
    long first_identified_step() const noexcept { return static_cast<long>(std::max(n_a_, n_b_)) + 1; }

    /// Index of a_i (1-based i) inside theta.
    int index_a(int i) const noexcept { return i - 1; }
    /// Index of b_j (0-based j) inside theta.
    int index_b(int j) const noexcept { return n_a_ + j; }
    /// "a1", "b0", ...
    std::string param_name(int k) const;
    /// Inverse of param_name; throws ConfigError for unknown names.
    int param_index(const std::string& name) const;

    friend bool operator==(const ModelOrder&, const ModelOrder&) = default;

private:
    int n_a_;
    int n_b_;
};

struct ParameterVector {
    std::vector<double> values;
    long t = 0;
};

/// Time law of one parameter: constant, or offset + A sin(2 pi t / T).
class ParameterTrajectory {
public:
    enum class Kind { Constant, Sinusoid };

    static ParameterTrajectory constant(double value);
    static ParameterTrajectory sinusoid(double offset, double amplitude, double period);

    Kind kind() const noexcept { return kind_; }
    double offset() const noexcept { return offset_; }
    double amplitude() const noexcept { return amplitude_; }
    double period() const noexcept { return period_; }

    double at(long t) const;

private:
    ParameterTrajectory(Kind kind, double offset, double amplitude, double period)
        : kind_(kind), offset_(offset), amplitude_(amplitude), period_(period) {}

    Kind kind_;
    double offset_;
    double amplitude_;
    double period_;
};

/// Bound on |theta(t) - theta(t-1)|: 0 for constants, 2 pi |A| / T for sinusoids.
double variation_bound_of(const ParameterTrajectory& trajectory);
std::vector<double> variation_bounds_of(std::span<const ParameterTrajectory> trajectories);

struct NoiseSpec {
    double delta_eta = 0.0;   ///< output noise bound
    double delta_zeta = 0.0;  ///< input noise bound
    std::uint64_t seed = 0;
};

struct InputSpec {
    double lo = -1.0;
    double hi = 1.0;
    std::uint64_t seed = 0;
};

struct Dataset {
    explicit Dataset(ModelOrder o) : order(o) {}

    ModelOrder order;
    // Index 0 holds sample t = 1.
    std::vector<double> u, y;                      // observed
    std::vector<double> x, w, eta, zeta;           // hidden
    std::vector<std::vector<double>> theta;        // true theta(t), one row per sample

    long size() const noexcept { return static_cast<long>(u.size()); }

    double u_at(long t) const noexcept { return sample(u, t); }
    double y_at(long t) const noexcept { return sample(y, t); }
    double x_at(long t) const noexcept { return sample(x, t); }
    double w_at(long t) const noexcept { return sample(w, t); }
    double eta_at(long t) const noexcept { return sample(eta, t); }
    double zeta_at(long t) const noexcept { return sample(zeta, t); }
    ParameterVector theta_at(long t) const;

    static double sample(const std::vector<double>& s, long t) noexcept {
        return (t >= 1 && t <= static_cast<long>(s.size())) ? s[static_cast<std::size_t>(t - 1)] : 0.0;
    }
};

/// Magnitude of w beyond which simulation aborts.
inline constexpr double kDivergenceCap = 1e9;

/// Uniform samples on [lo, hi] from a 53-bit draw of mt19937_64, so the
/// sequence depends only on the seed (not on the standard library).
std::vector<double> uniform_sequence(long n, double lo, double hi, std::uint64_t seed);

/// Simulates with a uniformly random input drawn from `input`.
Dataset simulate(std::span<const ParameterTrajectory> trajectories, ModelOrder order, const NoiseSpec& noise,
                 const InputSpec& input, long n);

/// Simulates with an explicit noise-free input sequence x(1..N).
Dataset simulate(std::span<const ParameterTrajectory> trajectories, ModelOrder order, const NoiseSpec& noise,
                 std::span<const double> x);

/// Returned by the SNR functions when the noise energy is zero.
inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

double snr_db(std::span<const double> signal, std::span<const double> noise);
double snr_input(const Dataset& d);
double snr_output(const Dataset& d);

/// Noise bound for which uniform noise on [-delta, delta] reaches the target
/// SNR in expectation: delta = sqrt(3 sum(s^2) / (N 10^(snr/10))).
double delta_for_snr(std::span<const double> signal, double target_snr_db);

}  // namespace smid
