#include "survkit/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "survkit/diagnostics.hpp"
#include "survkit/stats.hpp"

namespace survkit {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

bool parse_double(const std::string& field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_int(const std::string& field, int& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_flag(const std::string& field, bool& out) {
    if (field == "0") { out = false; return true; }
    if (field == "1") { out = true; return true; }
    return false;
}

std::string format_double(double v) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, ptr);
}

} // namespace

PanelLoadResult parse_panel(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("panel is empty: missing header line",
                          {kPanelColumns.begin(), kPanelColumns.end()}, {});
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_tabs(line);
    bool header_ok = header.size() == kPanelColumns.size();
    if (header_ok) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] != kPanelColumns[i]) { header_ok = false; break; }
        }
    }
    if (!header_ok) {
        std::vector<std::string> missing, extra;
        auto contains = [](const auto& haystack, std::string_view needle) {
            return std::find(haystack.begin(), haystack.end(), needle) != haystack.end();
        };
        for (const auto expected : kPanelColumns) {
            if (!contains(header, expected)) missing.emplace_back(expected);
        }
        for (const auto& got : header) {
            if (!contains(kPanelColumns, got)) extra.push_back(got);
        }
        std::string message = "panel header does not match the schema";
        if (!missing.empty()) {
            message += "; missing:";
            for (const auto& m : missing) message += " " + m;
        }
        if (!extra.empty()) {
            message += "; unexpected:";
            for (const auto& e : extra) message += " " + e;
        }
        if (missing.empty() && extra.empty()) message += "; columns are out of order";
        throw SchemaError(std::move(message), std::move(missing), std::move(extra));
    }

    PanelLoadResult result;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto fields = split_tabs(line);
        auto reject = [&](std::string reason) {
            result.rejected.push_back({line_number, std::move(reason)});
        };
        if (fields.size() != kPanelColumns.size()) {
            reject("expected " + std::to_string(kPanelColumns.size()) + " fields, found " +
                   std::to_string(fields.size()));
            continue;
        }

        IntervalRecord r;
        r.company_id = fields[0];

        const auto type = company_type_from_code(fields[1]);
        if (!type) { reject("company_type must be CP, EP or PL, got '" + fields[1] + "'"); continue; }
        r.company_type = *type;

        const auto kind = event_kind_from_code(fields[2]);
        if (!kind) { reject("investment_type must be VE, MA, IPO or NONE, got '" + fields[2] + "'"); continue; }
        r.event_kind = *kind;

        if (!parse_double(fields[3], r.investment_amount)) { reject("investment_amount_musd is not a number"); continue; }
        if (!parse_double(fields[4], r.total_capital_raised)) { reject("total_capital_raised_musd is not a number"); continue; }
        r.round_name = fields[5];
        if (!parse_int(fields[6], r.round_number)) { reject("round_number is not an integer"); continue; }
        if (!parse_double(fields[7], r.weeks_since_first)) { reject("weeks_since_first is not a number"); continue; }
        if (!parse_double(fields[8], r.duration_weeks)) { reject("weeks_since_last is not a number"); continue; }
        if (!parse_flag(fields[9], r.event_occurred)) { reject("event_occurred must be 0 or 1"); continue; }
        if (!parse_flag(fields[10], r.has_trends_data)) { reject("has_trends_data must be 0 or 1"); continue; }
        if (!fields[11].empty()) {
            double v;
            if (!parse_double(fields[11], v)) { reject("trends_delta_pct is not a number"); continue; }
            r.trends_delta = v;
        }
        if (!parse_flag(fields[12], r.has_traffic_data)) { reject("has_traffic_data must be 0 or 1"); continue; }
        if (!fields[13].empty()) {
            double v;
            if (!parse_double(fields[13], v)) { reject("traffic_delta_pct is not a number"); continue; }
            r.traffic_delta = v;
        }

        const auto problems = validate(r);
        if (!problems.empty()) {
            std::string reason;
            for (const auto& p : problems) {
                if (!reason.empty()) reason += "; ";
                reason += p;
            }
            reject(std::move(reason));
            continue;
        }
        result.records.push_back(std::move(r));
    }
    return result;
}

PanelLoadResult load_panel(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open panel file " + path.string());
    return parse_panel(in);
}

void write_panel(std::ostream& out, std::span<const IntervalRecord> records) {
    for (std::size_t i = 0; i < kPanelColumns.size(); ++i) {
        if (i) out << '\t';
        out << kPanelColumns[i];
    }
    out << '\n';
    for (const auto& r : records) {
        require_valid(r);
        out << r.company_id << '\t' << to_code(r.company_type) << '\t' << to_code(r.event_kind)
            << '\t' << format_double(r.investment_amount) << '\t'
            << format_double(r.total_capital_raised) << '\t' << r.round_name << '\t'
            << r.round_number << '\t' << format_double(r.weeks_since_first) << '\t'
            << format_double(r.duration_weeks) << '\t' << (r.event_occurred ? '1' : '0') << '\t'
            << (r.has_trends_data ? '1' : '0') << '\t'
            << (r.trends_delta ? format_double(*r.trends_delta) : std::string()) << '\t'
            << (r.has_traffic_data ? '1' : '0') << '\t'
            << (r.traffic_delta ? format_double(*r.traffic_delta) : std::string()) << '\n';
    }
}

void save_panel(const std::filesystem::path& path, std::span<const IntervalRecord> records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_panel(out, records);
    out.flush();
    if (!out) throw std::runtime_error("failed writing panel to " + path.string());
}

namespace {

constexpr std::array<std::string_view, 9> kKnownCovariates = {
    "Log(totalCapital)", "roundNumber", "weeksSinceFirst",
    "trafficDelta", "hasTrendsData", "trendsDelta", "trendsDeltaSign",
    "companyType=EP", "companyType=PL"};

double covariate_value(std::string_view name, const IntervalRecord& r) {
    if (name == "Log(totalCapital)") return std::log1p(r.total_capital_raised);
    if (name == "roundNumber") return static_cast<double>(r.round_number);
    if (name == "weeksSinceFirst") return r.weeks_since_first;
    if (name == "trafficDelta") return r.traffic_delta.value_or(0.0);
    if (name == "hasTrendsData") return r.has_trends_data ? 1.0 : 0.0;
    if (name == "trendsDelta") return r.trends_delta.value_or(0.0);
    if (name == "trendsDeltaSign") return r.trends_delta.value_or(0.0) > 0.0 ? 1.0 : 0.0;
    if (name == "companyType=EP") return r.company_type == CompanyType::EnterpriseProduct ? 1.0 : 0.0;
    if (name == "companyType=PL") return r.company_type == CompanyType::Platform ? 1.0 : 0.0;
    throw std::invalid_argument("unknown covariate " + std::string(name));
}

ColumnKind covariate_kind(std::string_view name) {
    if (name == "hasTrendsData" || name == "trendsDeltaSign" || name == "companyType=EP" ||
        name == "companyType=PL") {
        return ColumnKind::Indicator;
    }
    return ColumnKind::Continuous;
}

std::string covariate_source(std::string_view name) {
    if (name == "Log(totalCapital)") return "ln(1 + total_capital_raised_musd)";
    if (name == "roundNumber") return "round_number";
    if (name == "weeksSinceFirst") return "weeks_since_first";
    if (name == "trafficDelta") return "traffic_delta_pct, 0 when absent";
    if (name == "hasTrendsData") return "has_trends_data";
    if (name == "trendsDelta") return "trends_delta_pct, 0 when absent";
    if (name == "trendsDeltaSign") return "1 when trends_delta_pct > 0";
    if (name == "companyType=EP") return "company_type == EP";
    if (name == "companyType=PL") return "company_type == PL";
    return {};
}

} // namespace

CovariateRecipe CovariateRecipe::standard() {
    CovariateRecipe recipe;
    recipe.covariates.assign(kKnownCovariates.begin(), kKnownCovariates.end());
    return recipe;
}

CovariateRecipe CovariateRecipe::standard_with_time_interactions() {
    CovariateRecipe recipe = standard();
    recipe.interactions = {{"roundNumber", TimeScale::YearsSinceFirst},
                           {"weeksSinceFirst", TimeScale::WeeksSinceLast}};
    return recipe;
}

std::span<const std::string_view> known_covariates() { return kKnownCovariates; }

CovariateRecipe load_recipe(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open recipe file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("recipe " + path.string() + " is not valid JSON: " + e.what());
    }

    if (!doc.is_object() || !doc.contains("covariates") || !doc["covariates"].is_array()) {
        throw std::invalid_argument("recipe must be an object with a 'covariates' array");
    }
    CovariateRecipe recipe;
    for (const auto& item : doc["covariates"]) {
        if (!item.is_string()) throw std::invalid_argument("recipe covariates must be strings");
        recipe.covariates.push_back(item.get<std::string>());
    }
    if (doc.contains("interactions")) {
        if (!doc["interactions"].is_array()) {
            throw std::invalid_argument("recipe interactions must be an array");
        }
        for (const auto& item : doc["interactions"]) {
            if (!item.is_object() || !item.contains("covariate") || !item.contains("time_scale")) {
                throw std::invalid_argument(
                    "each interaction needs 'covariate' and 'time_scale' fields");
            }
            const auto scale_name = item["time_scale"].get<std::string>();
            TimeScale scale;
            if (scale_name == "yearsSinceFirst") {
                scale = TimeScale::YearsSinceFirst;
            } else if (scale_name == "weeksSinceLast") {
                scale = TimeScale::WeeksSinceLast;
            } else {
                throw std::invalid_argument("unknown time_scale '" + scale_name +
                                            "': use yearsSinceFirst or weeksSinceLast");
            }
            recipe.interactions.emplace_back(item["covariate"].get<std::string>(), scale);
        }
    }
    return recipe;
}

DesignMatrix build_design(std::span<const IntervalRecord> records, const CovariateRecipe& recipe) {
    if (records.empty()) throw std::invalid_argument("build_design: no records");
    if (recipe.covariates.empty()) throw std::invalid_argument("build_design: recipe has no covariates");

    DesignMatrix design;
    const auto n = static_cast<Eigen::Index>(records.size());
    design.values.resize(n, static_cast<Eigen::Index>(recipe.covariates.size()));
    design.durations.reserve(records.size());
    design.events.reserve(records.size());

    for (std::size_t j = 0; j < recipe.covariates.size(); ++j) {
        const auto& name = recipe.covariates[j];
        if (std::find(recipe.covariates.begin(), recipe.covariates.begin() + static_cast<long>(j),
                      name) != recipe.covariates.begin() + static_cast<long>(j)) {
            throw std::invalid_argument("recipe repeats covariate " + name);
        }
        if (std::find(kKnownCovariates.begin(), kKnownCovariates.end(), name) ==
            kKnownCovariates.end()) {
            std::string known;
            for (const auto& c : kKnownCovariates) {
                known += known.empty() ? std::string(c) : ", " + std::string(c);
            }
            throw std::invalid_argument("unknown covariate '" + name + "'; known: " + known);
        }
        design.columns.push_back({name, covariate_kind(name), covariate_source(name)});
    }

    std::vector<double> weeks_since_first;
    weeks_since_first.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        require_valid(records[i]);
        design.durations.push_back(records[i].duration_weeks);
        design.events.push_back(records[i].event_occurred);
        weeks_since_first.push_back(records[i].weeks_since_first);
        for (std::size_t j = 0; j < recipe.covariates.size(); ++j) {
            design.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                covariate_value(recipe.covariates[j], records[i]);
        }
    }

    require_consistent(design);
    if (recipe.interactions.empty()) return design;
    return augment_with_time_interactions(design, weeks_since_first, recipe.interactions);
}

DistributionSummary summarize_values(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("summarize_values: empty sample");
    std::sort(values.begin(), values.end());
    DistributionSummary s;
    s.n = values.size();
    s.min = values.front();
    s.max = values.back();
    s.q1 = stats::quantile_sorted(values, 0.25);
    s.median = stats::quantile_sorted(values, 0.5);
    s.q3 = stats::quantile_sorted(values, 0.75);
    double total = 0.0;
    for (const double v : values) total += v;
    s.mean = total / static_cast<double>(values.size());
    return s;
}

PanelSummary summarize_panel(std::span<const IntervalRecord> records) {
    if (records.empty()) throw std::invalid_argument("summarize_panel: no records");

    PanelSummary summary;
    summary.n_records = records.size();

    std::vector<double> amounts_all, durations_all, censored_durations, rounds;
    std::array<std::vector<double>, 3> amounts_by_kind, durations_by_kind;
    std::vector<double> trends, traffic;

    for (const auto& r : records) {
        require_valid(r);
        summary.event_counts[static_cast<std::size_t>(r.event_kind)]++;
        summary.company_type_counts[static_cast<std::size_t>(r.company_type)]++;
        durations_all.push_back(r.duration_weeks);
        rounds.push_back(static_cast<double>(r.round_number));

        if (r.event_occurred) {
            const auto kind = static_cast<std::size_t>(r.event_kind);
            durations_by_kind[kind].push_back(r.duration_weeks);
            if (r.investment_amount > 0.0) {
                amounts_all.push_back(r.investment_amount);
                amounts_by_kind[kind].push_back(r.investment_amount);
            }
        } else {
            censored_durations.push_back(r.duration_weeks);
        }

        if (r.has_trends_data) {
            ++summary.n_with_trends;
            trends.push_back(*r.trends_delta);
        }
        if (r.has_traffic_data) {
            ++summary.n_with_traffic;
            traffic.push_back(*r.traffic_delta);
        }
    }

    summary.durations_all = summarize_values(std::move(durations_all));
    summary.round_numbers = summarize_values(std::move(rounds));
    if (!amounts_all.empty()) summary.amount_all = summarize_values(std::move(amounts_all));
    if (!censored_durations.empty()) {
        summary.duration_censored = summarize_values(std::move(censored_durations));
    }
    for (std::size_t kind = 0; kind < 3; ++kind) {
        if (!amounts_by_kind[kind].empty()) {
            summary.amount_by_kind[kind] = summarize_values(std::move(amounts_by_kind[kind]));
        }
        if (!durations_by_kind[kind].empty()) {
            summary.duration_by_kind[kind] = summarize_values(std::move(durations_by_kind[kind]));
        }
    }
    if (!trends.empty()) summary.trends_delta = summarize_values(std::move(trends));
    if (!traffic.empty()) summary.traffic_delta = summarize_values(std::move(traffic));
    return summary;
}

} // namespace survkit
