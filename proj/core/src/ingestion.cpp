#include "qhub/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "qhub/error.hpp"
#include "qhub/submission_io.hpp"
#include "text_util.hpp"

namespace qhub {

using detail::numbered_lines;
using detail::parse_double;
using detail::split;

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---- prices ---------------------------------------------------------------

PriceSeries::PriceSeries(std::vector<PricePoint> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!(entries_[i].close > 0.0) || !std::isfinite(entries_[i].close))
            throw DomainError("price on " + format_date(entries_[i].date) + " is not positive");
        if (i > 0 && !(entries_[i - 1].date < entries_[i].date))
            throw DomainError("price dates are not strictly increasing at " + format_date(entries_[i].date));
    }
}

std::optional<std::size_t> PriceSeries::index_of(Date d) const {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), d,
                                     [](const PricePoint& p, Date x) { return p.date < x; });
    if (it == entries_.end() || it->date != d) return std::nullopt;
    return static_cast<std::size_t>(it - entries_.begin());
}

std::optional<std::size_t> PriceSeries::last_index_on_or_before(Date d) const {
    const auto it = std::upper_bound(entries_.begin(), entries_.end(), d,
                                     [](Date x, const PricePoint& p) { return x < p.date; });
    if (it == entries_.begin()) return std::nullopt;
    return static_cast<std::size_t>(it - entries_.begin()) - 1;
}

std::optional<double> PriceSeries::close_on(Date d) const {
    const auto i = index_of(d);
    if (!i) return std::nullopt;
    return entries_[*i].close;
}

PriceSeries parse_prices(std::string_view text) {
    const auto lines = numbered_lines(text);
    if (lines.empty()) throw InputError("price file is empty; expected header 'date,close'");
    if (lines.front().second != "date,close")
        throw InputError("price header must be 'date,close'", lines.front().first);
    std::vector<PricePoint> entries;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [no, line] = lines[i];
        const auto fields = split(line, ',');
        if (fields.size() != 2) throw InputError("expected 'date,close'", no);
        const auto date = parse_date(fields[0]);
        if (!date) throw InputError("malformed date '" + std::string(fields[0]) + "'", no);
        const auto close = parse_double(fields[1]);
        if (!close || !std::isfinite(*close)) throw InputError("malformed price '" + std::string(fields[1]) + "'", no);
        if (*close <= 0.0) throw InputError("price must be positive", no);
        if (!entries.empty()) {
            if (entries.back().date == *date) throw InputError("duplicate date " + format_date(*date), no);
            if (*date < entries.back().date) throw InputError("dates are not sorted at " + format_date(*date), no);
        }
        entries.push_back({*date, *close});
    }
    return PriceSeries(std::move(entries));
}

PriceSeries load_prices(const std::filesystem::path& path) { return parse_prices(read_text_file(path)); }

std::string serialize_prices(const PriceSeries& prices) {
    std::string out = "date,close\n";
    for (const auto& p : prices.entries()) out += format_date(p.date) + "," + format_number(p.close) + "\n";
    return out;
}

double compute_return(const PriceSeries& prices, Date t, int trading_steps) {
    if (trading_steps <= 0) throw DomainError("trading_steps must be positive");
    const auto idx = prices.index_of(t);
    if (!idx) throw DomainError("no price on " + format_date(t));
    if (*idx < static_cast<std::size_t>(trading_steps))
        throw DomainError("insufficient price history before " + format_date(t));
    const auto& e = prices.entries();
    return 100.0 * (std::log(e[*idx].close) - std::log(e[*idx - trading_steps].close));
}

std::optional<std::size_t> dax_anchor_index(const PriceSeries& prices, Date round_date) {
    return prices.last_index_on_or_before(round_date);
}

std::optional<double> dax_outcome(const PriceSeries& prices, Date round_date, const Horizon& horizon) {
    horizon_index(TargetKind::dax, horizon);
    const auto anchor = dax_anchor_index(prices, round_date);
    if (!anchor) return std::nullopt;
    const auto close = prices.close_on(add_days(round_date, horizon.magnitude));
    if (!close) return std::nullopt;
    return 100.0 * (std::log(*close) - std::log(prices.entries()[*anchor].close));
}

// ---- observations ---------------------------------------------------------

Observation ObservationSeries::at(Timestamp t) const {
    const auto it = values_.find(t);
    return {target_, t, it == values_.end() ? std::nullopt : std::optional<double>(it->second)};
}

void ObservationSeries::set(Timestamp t, double value) {
    if (!std::isfinite(value)) throw DomainError("observation at " + format_timestamp(t) + " is not finite");
    if (target_ == TargetKind::wind && value < 0.0)
        throw DomainError("wind speed at " + format_timestamp(t) + " is negative");
    values_[t] = value;
}

void ObservationSeries::merge(const ObservationSeries& other) {
    if (other.target_ != target_) throw DomainError("cannot merge observations of different targets");
    for (const auto& [t, v] : other.values_) values_[t] = v;
}

ObservationSeries parse_observations(std::string_view text, TargetKind target) {
    if (target == TargetKind::dax)
        throw DomainError("DAX outcomes are derived from prices, not station observations");
    ObservationSeries series(target);
    const auto lines = numbered_lines(text);
    if (lines.empty()) throw InputError("observation file is empty; expected header 'timestamp_utc,value'");
    if (lines.front().second != "timestamp_utc,value")
        throw InputError("observation header must be 'timestamp_utc,value'", lines.front().first);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [no, line] = lines[i];
        const auto fields = split(line, ',');
        if (fields.size() != 2) throw InputError("expected 'timestamp_utc,value'", no);
        const auto ts = parse_timestamp(fields[0]);
        if (!ts) throw InputError("malformed timestamp '" + std::string(fields[0]) + "'", no);
        const auto value = parse_double(fields[1]);
        if (!value) throw InputError("malformed value '" + std::string(fields[1]) + "'", no);
        if (!std::isfinite(*value)) throw InputError("value is not finite", no);
        if (target == TargetKind::wind && *value < 0.0) throw InputError("wind speed must be nonnegative", no);
        const auto since_midnight = *ts - std::chrono::floor<std::chrono::days>(*ts);
        if (since_midnight != std::chrono::hours{0} && since_midnight != std::chrono::hours{12}) continue;
        series.set(*ts, *value);
    }
    return series;
}

ObservationSeries load_observations(const std::filesystem::path& path, TargetKind target) {
    return parse_observations(read_text_file(path), target);
}

std::string serialize_observations(const ObservationSeries& series) {
    std::string out = "timestamp_utc,value\n";
    for (const auto& [t, v] : series.values()) out += format_timestamp(t) + "," + format_number(v) + "\n";
    return out;
}

// ---- NWP ------------------------------------------------------------------

std::string_view nwp_variable_code(NwpVariable v) {
    switch (v) {
    case NwpVariable::mean_sea_level_pressure: return "mslp";
    case NwpVariable::total_cloud_cover: return "cloud_cover";
    case NwpVariable::direct_radiation: return "direct_rad";
    case NwpVariable::temperature_2m: return "temperature_2m";
    case NwpVariable::temperature_850hpa: return "temperature_850hpa";
    case NwpVariable::wind_10m: return "wind_10m";
    case NwpVariable::wind_gust_10m: return "wind_gust_10m";
    }
    return "";
}

std::optional<NwpVariable> parse_nwp_variable(std::string_view code) {
    for (auto v : {NwpVariable::mean_sea_level_pressure, NwpVariable::total_cloud_cover,
                   NwpVariable::direct_radiation, NwpVariable::temperature_2m,
                   NwpVariable::temperature_850hpa, NwpVariable::wind_10m, NwpVariable::wind_gust_10m})
        if (nwp_variable_code(v) == code) return v;
    return std::nullopt;
}

NwpVariable nwp_variable_for(TargetKind target) {
    switch (target) {
    case TargetKind::temperature: return NwpVariable::temperature_2m;
    case TargetKind::wind: return NwpVariable::wind_10m;
    case TargetKind::dax: break;
    }
    throw DomainError("DAX has no NWP variable");
}

double EnsembleNwpForecast::mean() const {
    return std::accumulate(members.begin(), members.end(), 0.0) / static_cast<double>(members.size());
}

double EnsembleNwpForecast::variance() const {
    const double m = mean();
    double ss = 0.0;
    for (double v : members) ss += (v - m) * (v - m);
    return ss / static_cast<double>(members.size() - 1);
}

std::vector<EnsembleNwpForecast> parse_nwp(std::string_view text) {
    const auto lines = numbered_lines(text);
    if (lines.empty() || !lines.front().second.starts_with("init_time="))
        throw InputError("NWP file must start with 'init_time=<ISO8601>'", lines.empty() ? 0 : lines.front().first);
    const auto init = parse_timestamp(lines.front().second.substr(10));
    if (!init) throw InputError("malformed init_time", lines.front().first);

    std::vector<EnsembleNwpForecast> out;
    for (std::size_t i = 1; i < lines.size(); i += 2) {
        const auto [no, block] = lines[i];
        const auto parts = split(block, ' ');
        std::vector<std::string_view> tokens;
        for (auto p : parts)
            if (!p.empty()) tokens.push_back(p);
        if (tokens.size() != 2 || !tokens[0].starts_with("variable=") || !tokens[1].starts_with("lead="))
            throw InputError("expected block header 'variable=<code> lead=<hours>'", no);
        const auto code = tokens[0].substr(9);
        const auto var = parse_nwp_variable(code);
        if (!var) throw InputError("unknown NWP variable code '" + std::string(code) + "'", no);
        const auto lead = detail::parse_int(tokens[1].substr(5));
        if (!lead || *lead < 0 || *lead > kMaxLeadHours)
            throw InputError("lead must be an integer in [0, 120]", no);
        const std::string block_name = std::string(code) + " lead=" + std::to_string(*lead);
        if (i + 1 >= lines.size()) throw InputError("block " + block_name + " has no member line", no);
        const auto [vno, values_line] = lines[i + 1];
        const auto values = split(values_line, ',');
        if (values.size() != kNwpMembers)
            throw InputError("block " + block_name + " has " + std::to_string(values.size()) +
                                 " members, expected 40",
                             vno);
        EnsembleNwpForecast fc;
        fc.variable = *var;
        fc.init_time = *init;
        fc.lead_hours = static_cast<int>(*lead);
        for (std::size_t k = 0; k < kNwpMembers; ++k) {
            const auto v = parse_double(values[k]);
            if (!v || !std::isfinite(*v))
                throw InputError("block " + block_name + " member " + std::to_string(k + 1) + " is not a finite number", vno);
            fc.members[k] = *v;
        }
        for (const auto& prev : out)
            if (prev.variable == fc.variable && prev.lead_hours == fc.lead_hours)
                throw InputError("duplicate block " + block_name, no);
        out.push_back(fc);
    }
    return out;
}

std::vector<EnsembleNwpForecast> load_nwp_file(const std::filesystem::path& path) {
    return parse_nwp(read_text_file(path));
}

std::string serialize_nwp(const std::vector<EnsembleNwpForecast>& blocks) {
    if (blocks.empty()) throw DomainError("nothing to serialize");
    std::string out = "init_time=" + format_timestamp(blocks.front().init_time) + "\n";
    for (const auto& b : blocks) {
        if (b.init_time != blocks.front().init_time) throw DomainError("blocks have different init times");
        out += "variable=" + std::string(nwp_variable_code(b.variable)) + " lead=" + std::to_string(b.lead_hours) + "\n";
        for (std::size_t k = 0; k < kNwpMembers; ++k) {
            if (k) out += ',';
            out += format_number(b.members[k]);
        }
        out += '\n';
    }
    return out;
}

void NwpStore::add(const EnsembleNwpForecast& fc) { data_[{fc.variable, fc.init_time, fc.lead_hours}] = fc; }

void NwpStore::add(const std::vector<EnsembleNwpForecast>& fcs) {
    for (const auto& fc : fcs) add(fc);
}

const EnsembleNwpForecast* NwpStore::find(NwpVariable v, Timestamp init, int lead) const {
    const auto it = data_.find({v, init, lead});
    return it == data_.end() ? nullptr : &it->second;
}

std::vector<const EnsembleNwpForecast*> NwpStore::series(NwpVariable v, int lead) const {
    std::vector<const EnsembleNwpForecast*> out;
    for (const auto& [key, fc] : data_)
        if (std::get<0>(key) == v && std::get<2>(key) == lead) out.push_back(&fc);
    return out;
}

} // namespace qhub
