#include "qhub/config.hpp"

#include <sstream>

#include "qhub/error.hpp"
#include "qhub/ingestion.hpp"
#include "text_util.hpp"

namespace qhub {

HubConfig parse_config(std::string_view text) {
    HubConfig cfg;
    for (auto [no, line] : detail::numbered_lines(text)) {
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = detail::trim(line.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw InputError("expected key = value", no);
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));

        auto date = [&] {
            const auto d = parse_date(value);
            if (!d) throw InputError(std::string(key) + " must be a YYYY-MM-DD date", no);
            return *d;
        };
        auto integer = [&] {
            const auto v = detail::parse_int(value);
            if (!v || *v < 0) throw InputError(std::string(key) + " must be a nonnegative integer", no);
            return *v;
        };
        auto boolean = [&] {
            if (value == "true" || value == "1" || value == "yes") return true;
            if (value == "false" || value == "0" || value == "no") return false;
            throw InputError(std::string(key) + " must be true or false", no);
        };

        if (key == "station_id") cfg.station_id = std::string(value);
        else if (key == "station_cutover") cfg.station_cutover = date();
        else if (key == "allow_cross_cutover_training") cfg.allow_cross_cutover_training = boolean();
        else if (key == "season_start") cfg.season_start = date();
        else if (key == "season_end") cfg.season_end = date();
        else if (key == "weather_start") cfg.weather_start = date();
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(integer());
        else if (key == "dax_window") cfg.dax_window = static_cast<int>(integer());
        else if (key == "skip_allowance") cfg.skip_allowance = static_cast<int>(integer());
        else throw InputError("unknown configuration key '" + std::string(key) + "'", no);
    }
    if (cfg.season_end < cfg.season_start) throw InputError("season_end precedes season_start");
    if (cfg.dax_window < 5) throw InputError("dax_window must be at least 5");
    return cfg;
}

HubConfig load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

std::string serialize_config(const HubConfig& cfg) {
    std::ostringstream out;
    out << "station_id = " << cfg.station_id << "\n";
    if (cfg.station_cutover) out << "station_cutover = " << format_date(*cfg.station_cutover) << "\n";
    out << "allow_cross_cutover_training = " << (cfg.allow_cross_cutover_training ? "true" : "false") << "\n"
        << "season_start = " << format_date(cfg.season_start) << "\n"
        << "season_end = " << format_date(cfg.season_end) << "\n"
        << "weather_start = " << format_date(cfg.weather_start) << "\n"
        << "seed = " << cfg.seed << "\n"
        << "dax_window = " << cfg.dax_window << "\n"
        << "skip_allowance = " << cfg.skip_allowance << "\n";
    return out.str();
}

} // namespace qhub
