#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "survkit/record.hpp"

namespace survkit {

/// Deterministic 64-bit generator (splitmix64). Cheap to seed, so every
/// simulated subject gets its own stream derived from (seed, subject index)
/// and the output is independent of generation order.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    /// Uniform on (0, 1): 53 random bits, nudged off zero so logs are safe.
    double uniform01();

    /// Standard normal via Box-Muller; consumes two uniforms per call.
    double normal();

private:
    std::uint64_t state_;
};

/// Stream seed for subject `index` under master `seed`.
std::uint64_t subject_seed(std::uint64_t seed, std::uint64_t index);

/// Which record field a drawn covariate is written into, so generated panels
/// can be refit through the regular covariate constructions.
enum class CovariateTarget {
    TrafficDelta,     // traffic_delta_pct, covariate "trafficDelta"
    TrendsDelta,      // trends_delta_pct, covariate "trendsDelta"
    CompanyTypeEp,    // EP vs CP indicator, covariate "companyType=EP"
    WeeksSinceFirst,  // weeks_since_first, covariate "weeksSinceFirst"
    LogTotalCapital   // ln(1+total_capital_raised), covariate "Log(totalCapital)"
};

std::string_view to_label(CovariateTarget target);
std::string_view covariate_name(CovariateTarget target);

struct CovariateSpec {
    enum class Distribution { Normal, Uniform, Indicator };

    std::string name;
    Distribution distribution = Distribution::Normal;
    double mean = 0.0, sd = 1.0;  // Normal
    double lo = 0.0, hi = 1.0;    // Uniform
    double probability = 0.5;     // Indicator
    CovariateTarget target = CovariateTarget::TrafficDelta;
};

struct CauseModel {
    EventKind kind = EventKind::VentureEquity;
    std::vector<double> beta;  // one per covariate
};

/// Proportional-hazards world to draw from: constant baseline rate per cause
/// scale factor exp(x beta), administrative censoring at the horizon. Event
/// times land in [1, 1 + horizon]: the latent exponential is shifted by the
/// one-week origin every panel duration respects.
struct Scenario {
    std::size_t n_subjects = 0;
    double baseline_rate = 0.0;    // events per week at x = 0
    double censor_horizon = 0.0;   // weeks past the origin
    std::uint64_t seed = 0;
    bool round_to_whole_weeks = false;  // ceil durations: integer weeks, ties
    std::vector<CovariateSpec> covariates;
    std::vector<CauseModel> causes;
};

/// Throws std::invalid_argument naming the offending field.
void require_valid(const Scenario& scenario);

/// Everything needed to check an estimator against the generator: the
/// scenario (true coefficients included), realized event tallies, the
/// covariate construction that reproduces the design, and the RNG identity.
struct GroundTruth {
    Scenario scenario;
    std::array<std::size_t, 4> event_tally{};  // indexed by EventKind
    std::vector<std::string> recipe_columns;
    std::string rng_algorithm = "splitmix64";
    int rng_version = 1;
};

std::pair<std::vector<IntervalRecord>, GroundTruth> generate(const Scenario& scenario);

Scenario load_scenario(const std::filesystem::path& path);
std::string ground_truth_json(const GroundTruth& truth);
void save_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);

} // namespace survkit
