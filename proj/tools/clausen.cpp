// Command-line entry point: verifies catalog identities at a requested digit
// count and prints one report line per entry.
//
// Exit codes: 0 all selected required entries match; 1 a required entry
// mismatched; 2 usage or catalog parse error; 3 numeric non-convergence on a
// required entry.

#include "clausen/catalog.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#ifndef CLAUSEN_DEFAULT_CATALOG
#define CLAUSEN_DEFAULT_CATALOG "catalog/main.cat"
#endif

namespace {

std::string default_catalog_path() {
    if (const char* env = std::getenv("CLAUSEN_CATALOG")) return env;
    return CLAUSEN_DEFAULT_CATALOG;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"clausen: high-precision verification of a hypergeometric identity catalog"};
    app.require_subcommand(1);

    auto* verify = app.add_subcommand("verify", "evaluate both sides of catalog identities");
    bool all = false;
    std::string id, status_filter, strategy_name = "auto", catalog_path = default_catalog_path();
    std::string format = "table";
    long digits = 40;
    unsigned jobs = 1;
    verify->add_flag("--all", all, "verify every catalog entry");
    verify->add_option("--id", id, "verify a single entry by id");
    verify->add_option("--status", status_filter, "restrict to a tier: verified|audit");
    verify->add_option("--digits", digits, "requested decimal digits (default 40)");
    verify->add_option("--strategy", strategy_name, "auto|series|integral|pfq|chain");
    verify->add_option("--catalog", catalog_path, "catalog file path");
    verify->add_option("--format", format, "table|lines");
    verify->add_option("--jobs", jobs, "parallel verification workers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    using namespace clausen;
    try {
        if (!all && id.empty() && status_filter.empty())
            throw usage_error("select entries with --all, --id <id> or --status <tier>");
        if (!status_filter.empty() && status_filter != "verified" && status_filter != "audit")
            throw usage_error("--status accepts verified|audit");
        if (format != "table" && format != "lines")
            throw usage_error("--format accepts table|lines");

        Strategy strategy = strategy_from_string(strategy_name);
        std::vector<IdentityRecord> records = load_catalog(catalog_path);

        std::vector<const IdentityRecord*> selected;
        for (const auto& r : records) {
            if (!id.empty() && r.id != id) continue;
            if (!status_filter.empty()) {
                EntryStatus want = status_filter == "audit" ? EntryStatus::audit
                                                            : EntryStatus::verified;
                if (r.expected_status != want) continue;
            }
            selected.push_back(&r);
        }
        if (!id.empty() && selected.empty())
            throw usage_error("no catalog entry with id '" + id + "'");

        EvalContext ctx = ctx_new(digits);
        std::vector<VerifyReport> reports = verify_all(records, selected, strategy, ctx, jobs);
        std::cout << emit_report(reports, format);

        bool required_error = false, required_mismatch = false;
        for (const auto& r : reports) {
            if (!r.required) continue;
            if (r.status == VerifyStatus::error) required_error = true;
            if (r.status == VerifyStatus::mismatch) required_mismatch = true;
        }
        if (required_error) return 3;
        if (required_mismatch) return 1;
        return 0;
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
