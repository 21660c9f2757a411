#include "survkit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace survkit {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double SplitMix64::uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double SplitMix64::normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t subject_seed(std::uint64_t seed, std::uint64_t index) {
    // One scramble round separates the per-subject streams.
    return SplitMix64(seed + (index + 1) * 0x9E3779B97F4A7C15ull).next();
}

std::string_view to_label(CovariateTarget target) {
    switch (target) {
        case CovariateTarget::TrafficDelta: return "traffic_delta";
        case CovariateTarget::TrendsDelta: return "trends_delta";
        case CovariateTarget::CompanyTypeEp: return "company_type_ep";
        case CovariateTarget::WeeksSinceFirst: return "weeks_since_first";
        case CovariateTarget::LogTotalCapital: return "log_total_capital";
    }
    throw std::invalid_argument("to_label: unknown CovariateTarget");
}

std::string_view covariate_name(CovariateTarget target) {
    switch (target) {
        case CovariateTarget::TrafficDelta: return "trafficDelta";
        case CovariateTarget::TrendsDelta: return "trendsDelta";
        case CovariateTarget::CompanyTypeEp: return "companyType=EP";
        case CovariateTarget::WeeksSinceFirst: return "weeksSinceFirst";
        case CovariateTarget::LogTotalCapital: return "Log(totalCapital)";
    }
    throw std::invalid_argument("covariate_name: unknown CovariateTarget");
}

void require_valid(const Scenario& scenario) {
    auto fail = [](const std::string& message) { throw std::invalid_argument("scenario: " + message); };

    if (scenario.n_subjects < 1) fail("n_subjects must be >= 1");
    if (!(scenario.baseline_rate > 0.0) || !std::isfinite(scenario.baseline_rate)) {
        fail("baseline_rate must be positive and finite");
    }
    if (!(scenario.censor_horizon > 0.0) || !std::isfinite(scenario.censor_horizon)) {
        fail("censor_horizon must be positive and finite");
    }
    if (scenario.covariates.empty()) fail("at least one covariate is required");
    if (scenario.causes.empty()) fail("at least one cause is required");

    std::set<std::string> names;
    std::set<CovariateTarget> targets;
    for (const auto& c : scenario.covariates) {
        if (c.name.empty()) fail("covariate with empty name");
        if (!names.insert(c.name).second) fail("duplicate covariate name " + c.name);
        if (!targets.insert(c.target).second) {
            fail("two covariates target the same record field " + std::string(to_label(c.target)));
        }
        switch (c.distribution) {
            case CovariateSpec::Distribution::Normal:
                if (!std::isfinite(c.mean) || !(c.sd > 0.0) || !std::isfinite(c.sd)) {
                    fail("covariate " + c.name + ": normal needs finite mean and sd > 0");
                }
                break;
            case CovariateSpec::Distribution::Uniform:
                if (!std::isfinite(c.lo) || !std::isfinite(c.hi) || !(c.lo < c.hi)) {
                    fail("covariate " + c.name + ": uniform needs lo < hi");
                }
                break;
            case CovariateSpec::Distribution::Indicator:
                if (!(c.probability >= 0.0 && c.probability <= 1.0)) {
                    fail("covariate " + c.name + ": indicator probability outside [0, 1]");
                }
                break;
        }
        // Targets with restricted support.
        if (c.target == CovariateTarget::CompanyTypeEp &&
            c.distribution != CovariateSpec::Distribution::Indicator) {
            fail("covariate " + c.name + ": the company-type target requires an indicator");
        }
        if (c.target == CovariateTarget::WeeksSinceFirst ||
            c.target == CovariateTarget::LogTotalCapital) {
            const bool non_negative =
                c.distribution == CovariateSpec::Distribution::Indicator ||
                (c.distribution == CovariateSpec::Distribution::Uniform && c.lo >= 0.0);
            if (!non_negative) {
                fail("covariate " + c.name + ": target " + std::string(to_label(c.target)) +
                     " needs non-negative draws (indicator or uniform with lo >= 0)");
            }
        }
    }

    std::set<EventKind> kinds;
    for (const auto& cause : scenario.causes) {
        if (cause.kind == EventKind::NoEvent) fail("a cause cannot be the no-event marker");
        if (!kinds.insert(cause.kind).second) {
            fail("duplicate cause kind " + std::string(to_code(cause.kind)));
        }
        if (cause.beta.size() != scenario.covariates.size()) {
            fail("cause " + std::string(to_code(cause.kind)) + " has " +
                 std::to_string(cause.beta.size()) + " coefficients for " +
                 std::to_string(scenario.covariates.size()) + " covariates");
        }
        for (const double b : cause.beta) {
            if (!std::isfinite(b)) fail("cause " + std::string(to_code(cause.kind)) +
                                        " has a non-finite coefficient");
        }
    }
}

std::pair<std::vector<IntervalRecord>, GroundTruth> generate(const Scenario& scenario) {
    require_valid(scenario);

    GroundTruth truth;
    truth.scenario = scenario;
    for (const auto& c : scenario.covariates) {
        truth.recipe_columns.emplace_back(covariate_name(c.target));
    }

    std::vector<IntervalRecord> records;
    records.reserve(scenario.n_subjects);
    std::vector<double> x(scenario.covariates.size());

    for (std::size_t i = 0; i < scenario.n_subjects; ++i) {
        SplitMix64 rng(subject_seed(scenario.seed, i));

        for (std::size_t j = 0; j < scenario.covariates.size(); ++j) {
            const auto& c = scenario.covariates[j];
            switch (c.distribution) {
                case CovariateSpec::Distribution::Normal:
                    x[j] = c.mean + c.sd * rng.normal();
                    break;
                case CovariateSpec::Distribution::Uniform:
                    x[j] = c.lo + (c.hi - c.lo) * rng.uniform01();
                    break;
                case CovariateSpec::Distribution::Indicator:
                    x[j] = rng.uniform01() < c.probability ? 1.0 : 0.0;
                    break;
            }
        }

        // Latent exponential per cause; the earliest one below the horizon
        // wins, otherwise the subject is censored at the horizon.
        double best = std::numeric_limits<double>::infinity();
        EventKind winner = EventKind::NoEvent;
        for (const auto& cause : scenario.causes) {
            double lp = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) lp += x[j] * cause.beta[j];
            const double rate = scenario.baseline_rate * std::exp(lp);
            const double latent = -std::log(rng.uniform01()) / rate;
            if (latent < best) {
                best = latent;
                winner = cause.kind;
            }
        }

        IntervalRecord r;
        char id[16];
        std::snprintf(id, sizeof(id), "sim%06zu", i);
        r.company_id = id;
        r.round_name = "synthetic";
        r.round_number = 1;

        if (best <= scenario.censor_horizon) {
            r.event_kind = winner;
            r.event_occurred = true;
            r.duration_weeks = 1.0 + best;
        } else {
            r.event_kind = EventKind::NoEvent;
            r.event_occurred = false;
            r.duration_weeks = 1.0 + scenario.censor_horizon;
        }
        if (scenario.round_to_whole_weeks) r.duration_weeks = std::ceil(r.duration_weeks);

        for (std::size_t j = 0; j < x.size(); ++j) {
            switch (scenario.covariates[j].target) {
                case CovariateTarget::TrafficDelta:
                    r.has_traffic_data = true;
                    r.traffic_delta = x[j];
                    break;
                case CovariateTarget::TrendsDelta:
                    r.has_trends_data = true;
                    r.trends_delta = x[j];
                    break;
                case CovariateTarget::CompanyTypeEp:
                    r.company_type = x[j] == 1.0 ? CompanyType::EnterpriseProduct
                                                 : CompanyType::ConsumerProduct;
                    break;
                case CovariateTarget::WeeksSinceFirst:
                    r.weeks_since_first = x[j];
                    break;
                case CovariateTarget::LogTotalCapital:
                    r.total_capital_raised = std::expm1(x[j]);
                    break;
            }
        }

        truth.event_tally[static_cast<std::size_t>(r.event_kind)]++;
        require_valid(r);
        records.push_back(std::move(r));
    }

    return {std::move(records), std::move(truth)};
}

namespace {

nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json doc;
    doc["n_subjects"] = s.n_subjects;
    doc["baseline_rate"] = s.baseline_rate;
    doc["censor_horizon"] = s.censor_horizon;
    doc["seed"] = s.seed;
    doc["round_to_whole_weeks"] = s.round_to_whole_weeks;
    doc["covariates"] = nlohmann::json::array();
    for (const auto& c : s.covariates) {
        nlohmann::json entry;
        entry["name"] = c.name;
        entry["target"] = std::string(to_label(c.target));
        switch (c.distribution) {
            case CovariateSpec::Distribution::Normal:
                entry["distribution"] = "normal";
                entry["mean"] = c.mean;
                entry["sd"] = c.sd;
                break;
            case CovariateSpec::Distribution::Uniform:
                entry["distribution"] = "uniform";
                entry["lo"] = c.lo;
                entry["hi"] = c.hi;
                break;
            case CovariateSpec::Distribution::Indicator:
                entry["distribution"] = "indicator";
                entry["probability"] = c.probability;
                break;
        }
        doc["covariates"].push_back(std::move(entry));
    }
    doc["causes"] = nlohmann::json::array();
    for (const auto& cause : s.causes) {
        doc["causes"].push_back({{"kind", std::string(to_code(cause.kind))},
                                 {"beta", cause.beta}});
    }
    return doc;
}

CovariateTarget target_from_label(const std::string& label) {
    if (label == "traffic_delta") return CovariateTarget::TrafficDelta;
    if (label == "trends_delta") return CovariateTarget::TrendsDelta;
    if (label == "company_type_ep") return CovariateTarget::CompanyTypeEp;
    if (label == "weeks_since_first") return CovariateTarget::WeeksSinceFirst;
    if (label == "log_total_capital") return CovariateTarget::LogTotalCapital;
    throw std::invalid_argument("scenario: unknown covariate target '" + label + "'");
}

} // namespace

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("scenario " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("scenario must be a JSON object");

    Scenario s;
    try {
        s.n_subjects = doc.at("n_subjects").get<std::size_t>();
        s.baseline_rate = doc.at("baseline_rate").get<double>();
        s.censor_horizon = doc.at("censor_horizon").get<double>();
        s.seed = doc.at("seed").get<std::uint64_t>();
        s.round_to_whole_weeks = doc.value("round_to_whole_weeks", false);

        for (const auto& entry : doc.at("covariates")) {
            CovariateSpec c;
            c.name = entry.at("name").get<std::string>();
            c.target = target_from_label(entry.at("target").get<std::string>());
            const auto distribution = entry.at("distribution").get<std::string>();
            if (distribution == "normal") {
                c.distribution = CovariateSpec::Distribution::Normal;
                c.mean = entry.at("mean").get<double>();
                c.sd = entry.at("sd").get<double>();
            } else if (distribution == "uniform") {
                c.distribution = CovariateSpec::Distribution::Uniform;
                c.lo = entry.at("lo").get<double>();
                c.hi = entry.at("hi").get<double>();
            } else if (distribution == "indicator") {
                c.distribution = CovariateSpec::Distribution::Indicator;
                c.probability = entry.at("probability").get<double>();
            } else {
                throw std::invalid_argument("scenario: unknown distribution '" + distribution +
                                            "': use normal, uniform or indicator");
            }
            s.covariates.push_back(std::move(c));
        }

        for (const auto& entry : doc.at("causes")) {
            CauseModel cause;
            const auto code = entry.at("kind").get<std::string>();
            const auto kind = event_kind_from_code(code);
            if (!kind) throw std::invalid_argument("scenario: unknown cause kind '" + code + "'");
            cause.kind = *kind;
            cause.beta = entry.at("beta").get<std::vector<double>>();
            s.causes.push_back(std::move(cause));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("scenario " + path.string() + ": " + e.what());
    }

    require_valid(s);
    return s;
}

std::string ground_truth_json(const GroundTruth& truth) {
    nlohmann::json doc;
    doc["rng"] = {{"algorithm", truth.rng_algorithm}, {"version", truth.rng_version}};
    doc["scenario"] = scenario_to_json(truth.scenario);
    doc["event_tally"] = {
        {"VE", truth.event_tally[0]},
        {"MA", truth.event_tally[1]},
        {"IPO", truth.event_tally[2]},
        {"NONE", truth.event_tally[3]},
    };
    doc["recipe_columns"] = truth.recipe_columns;
    return doc.dump(2) + "\n";
}

void save_ground_truth(const std::filesystem::path& path, const GroundTruth& truth) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << ground_truth_json(truth);
    out.flush();
    if (!out) throw std::runtime_error("failed writing ground truth to " + path.string());
}

} // namespace survkit
