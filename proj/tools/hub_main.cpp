// Operator command line for a quantile forecasting hub store.

#include <iostream>

#include "CLI11.hpp"
#include "qhub/api.hpp"
#include "qhub/hub.hpp"

namespace fs = std::filesystem;
using namespace qhub;

namespace {

Date date_arg(const std::string& text) {
    if (auto d = parse_date(text)) return *d;
    if (auto d = parse_compact_date(text)) return *d;
    throw InputError("bad date '" + text + "' (expected YYYY-MM-DD)");
}

void print_report(const std::string& label, const ValidationReport& report) {
    std::cout << label << ": " << (report.verdict() == Verdict::accepted ? "accepted" : "rejected") << "\n";
    const auto text = report.to_text();
    if (!text.empty()) std::cout << text;
}

int validate(const std::string& file, const std::string& date_text, bool repair) {
    const auto name = parse_submission_filename(fs::path(file).filename().string());
    Date date;
    if (!date_text.empty()) date = date_arg(date_text);
    else if (name) date = name->round_date;
    else throw InputError("cannot infer the round date from the file name; pass --date");

    HubConfig defaults;
    const auto targets = date < defaults.weather_start ? std::vector<TargetKind>{TargetKind::dax}
                                                       : std::vector<TargetKind>(kAllTargets.begin(), kAllTargets.end());
    ParseOptions opts;
    opts.repair_sort = repair;
    const auto result =
        parse_submission(read_text_file(file), make_round(date, targets), name ? name->alias : "participant", opts);
    print_report(file, result.report);
    return result.submission ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantile forecasting hub operator tool"};
    app.require_subcommand(1);
    std::string store_dir = ".";
    app.add_option("--store", store_dir, "Hub store directory")->capture_default_str();

    std::string config_file;
    auto* init = app.add_subcommand("init", "Create a new store");
    init->add_option("--config", config_file, "Key-value config file");

    std::string date_text;
    auto* open_cmd = app.add_subcommand("open-round", "Register a Wednesday round");
    open_cmd->add_option("date", date_text, "Round date YYYY-MM-DD")->required();

    auto* close_cmd = app.add_subcommand("close-round", "Close a round for submissions");
    close_cmd->add_option("date", date_text, "Round date YYYY-MM-DD")->required();

    std::string dir;
    bool repair = false;
    auto* ingest = app.add_subcommand("ingest", "Validate and store a directory of submissions");
    ingest->add_option("date", date_text, "Round date YYYY-MM-DD")->required();
    ingest->add_option("dir", dir, "Directory of <YYYYMMDD>_<alias>.csv files")->required()->check(CLI::ExistingDirectory);
    ingest->add_flag("--repair-sort", repair, "Accept files whose quantiles only need sorting");

    std::string file;
    auto* prices = app.add_subcommand("load-prices", "Load DAX closing prices");
    prices->add_option("file", file, "CSV with date,close")->required()->check(CLI::ExistingFile);

    std::string target_text;
    auto* obs = app.add_subcommand("load-observations", "Load station observations");
    obs->add_option("target", target_text, "temperature or wind")->required();
    obs->add_option("file", file, "CSV with timestamp_utc,value")->required()->check(CLI::ExistingFile);

    std::vector<std::string> files;
    auto* nwp = app.add_subcommand("load-nwp", "Load ensemble NWP files");
    nwp->add_option("files", files, "NWP text files")->required()->check(CLI::ExistingFile);

    auto* score = app.add_subcommand("score", "Score a round and refresh the leaderboard");
    score->add_option("date", date_text, "Round date YYYY-MM-DD")->required();

    auto* board = app.add_subcommand("leaderboard", "Print the leaderboard CSV");

    std::string out_dir;
    auto* exp = app.add_subcommand("export", "Export public artifacts and API snapshots");
    exp->add_option("--out", out_dir, "Output directory")->required();

    int port = 8080;
    std::string host = "127.0.0.1";
    auto* serve = app.add_subcommand("serve", "Serve the read-only JSON API");
    serve->add_option("--port", port, "TCP port")->capture_default_str();
    serve->add_option("--host", host, "Bind address")->capture_default_str();

    auto* validate_cmd = app.add_subcommand("validate", "Check a submission file without a store");
    validate_cmd->add_option("file", file, "Submission CSV")->required()->check(CLI::ExistingFile);
    validate_cmd->add_option("--date", date_text, "Round date (default: from the file name)");
    validate_cmd->add_flag("--repair-sort", repair, "Accept files whose quantiles only need sorting");

    CLI11_PARSE(app, argc, argv);

    const fs::path root(store_dir);
    try {
        if (*validate_cmd) return validate(file, date_text, repair);

        if (*init) {
            const auto cfg = config_file.empty() ? HubConfig{} : load_config(config_file);
            hub::Store::init(root, cfg);
            std::cout << "initialized store at " << root.string() << "\n";
            return 0;
        }
        if (*serve) {
            api::serve(root, host, port, [&] {
                std::cout << "serving " << root.string() << " on http://" << host << ":" << port << "\n" << std::flush;
            });
            return 0;
        }
        if (*board) {
            const auto store = hub::Store::open(root);
            const auto path = root / "leaderboard.csv";
            std::cout << (fs::exists(path) ? read_text_file(path) : hub::leaderboard_csv(hub::compute_leaderboard(store)));
            return 0;
        }
        if (*exp) {
            const auto store = hub::Store::open(root);
            hub::export_store(store, out_dir);
            std::cout << "exported to " << out_dir << "\n";
            return 0;
        }

        hub::WriterLock lock(root);
        auto store = hub::Store::open(root);
        if (*open_cmd) {
            const auto spec = hub::open_round(store, date_arg(date_text));
            std::cout << "opened round " << format_date(spec.round_date) << " (" << spec.expected_row_count()
                      << " rows expected)\n";
        } else if (*close_cmd) {
            hub::close_round(store, date_arg(date_text));
            std::cout << "closed round " << date_text << "\n";
        } else if (*ingest) {
            ParseOptions opts;
            opts.repair_sort = repair;
            const auto s = hub::ingest_directory(store, date_arg(date_text), dir, opts);
            std::cout << "accepted " << s.accepted.size() << ", duplicates " << s.duplicates.size() << ", rejected "
                      << s.rejected.size() << ", skipped " << s.skipped.size() << "\n";
            for (const auto& [alias, report] : s.rejected) print_report("rejected " + alias, report);
            for (const auto& [name, reason] : s.skipped) std::cout << "skipped " << name << ": " << reason << "\n";
        } else if (*prices) {
            hub::load_prices_file(store, file);
            std::cout << "loaded prices from " << file << "\n";
        } else if (*obs) {
            const auto t = parse_target(target_text);
            if (!t || *t == TargetKind::dax) throw InputError("observation target must be temperature or wind");
            hub::load_observations_file(store, *t, file);
            std::cout << "loaded " << target_text << " observations from " << file << "\n";
        } else if (*nwp) {
            std::size_t n = 0;
            for (const auto& f : files) n += hub::load_nwp_into_store(store, f);
            std::cout << "stored " << n << " ensemble blocks from " << files.size() << " files\n";
        } else if (*score) {
            const auto delta = hub::score_round(store, date_arg(date_text));
            std::cout << "scored round " << format_date(delta.round) << ": " << delta.records << " records, "
                      << delta.scored_cells.size() << " cells";
            if (!delta.missing_observations.empty()) {
                std::cout << ", missing observations:";
                for (const auto& c : delta.missing_observations) std::cout << " [" << c.label() << "]";
            }
            std::cout << "\n";
            for (const auto& i : delta.issues)
                std::cout << "issue " << i.alias << " " << i.cell.label() << ": " << i.message << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "hub: " << e.what() << "\n";
        return 2;
    }
}
