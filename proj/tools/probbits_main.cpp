#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "probbits/bench.hpp"
#include "probbits/compiler.hpp"
#include "probbits/oracle.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace probbits;

namespace {

// exit codes, also listed in the README
constexpr int kExitFailure = 1;
constexpr int kExitParse = 2;
constexpr int kExitCompile = 3;
constexpr int kExitUnsatEvidence = 4;
constexpr int kExitTimeout = 5;
constexpr int kExitIo = 6;

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::SyntaxError: return kExitParse;
        case ErrorKind::UnsatisfiableEvidence: return kExitUnsatEvidence;
        case ErrorKind::Io: return kExitIo;
        default: return kExitCompile;
    }
}

// probabilities are printed with 12 significant digits
double sig12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::strtod(buf, nullptr);
}

json error_json(const Error& e) {
    json err;
    err["kind"] = error_kind_name(e.kind());
    err["message"] = e.what();
    if (e.line() > 0) {
        err["line"] = e.line();
        err["column"] = e.column();
    }
    return json{{"error", err}};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

lang::Encoding parse_encoding(const std::string& name) {
    return name == "categ" ? lang::Encoding::Categ : lang::Encoding::Bitwise;
}

json queries_to_json(const std::vector<lang::QueryResult>& queries) {
    json out = json::array();
    for (const lang::QueryResult& q : queries) {
        json item;
        item["expr"] = q.label;
        switch (q.kind) {
            case lang::Output::Kind::Probability:
                item["kind"] = "probability";
                item["probability"] = sig12(q.probability);
                break;
            case lang::Output::Kind::Distribution:
            case lang::Output::Kind::BetaPosterior: {
                item["kind"] = q.kind == lang::Output::Kind::BetaPosterior
                                   ? "beta_posterior"
                                   : "distribution";
                json dist = json::object();
                for (auto& [k, p] : q.distribution) dist[std::to_string(k)] = sig12(p);
                item["distribution"] = std::move(dist);
                item["expectation"] = sig12(q.expectation);
                if (q.kind == lang::Output::Kind::BetaPosterior) {
                    item["beta_total"] = q.beta_total;
                }
                break;
            }
        }
        out.push_back(std::move(item));
    }
    return out;
}

double max_deviation(const std::vector<lang::QueryResult>& run,
                     const std::vector<oracle::OracleQuery>& truth) {
    double dev = 0.0;
    for (size_t i = 0; i < run.size() && i < truth.size(); ++i) {
        if (run[i].kind == lang::Output::Kind::Probability) {
            dev = std::max(dev, std::abs(run[i].probability - truth[i].probability));
            continue;
        }
        for (auto& [k, p] : truth[i].distribution) {
            double got = run[i].distribution.count(k) ? run[i].distribution.at(k) : 0.0;
            dev = std::max(dev, std::abs(got - p));
        }
        for (auto& [k, p] : run[i].distribution) {
            double want = truth[i].distribution.count(k) ? truth[i].distribution.at(k) : 0.0;
            dev = std::max(dev, std::abs(p - want));
        }
    }
    return dev;
}

void pretty_queries(const std::vector<lang::QueryResult>& queries) {
    for (const lang::QueryResult& q : queries) {
        if (q.kind == lang::Output::Kind::Probability) {
            std::printf("  P(%s) = %.12g\n", q.label.c_str(), q.probability);
            continue;
        }
        if (q.kind == lang::Output::Kind::BetaPosterior) {
            std::printf("  %s ~ Beta posterior mixture (total %lld):\n", q.label.c_str(),
                        static_cast<long long>(q.beta_total));
            for (auto& [k, p] : q.distribution) {
                std::printf("    Beta(%llu, %lld) : %.12g\n",
                            static_cast<unsigned long long>(k),
                            static_cast<long long>(q.beta_total) - static_cast<long long>(k),
                            p);
            }
            continue;
        }
        std::printf("  %s:\n", q.label.c_str());
        for (auto& [k, p] : q.distribution) {
            std::printf("    %llu : %.12g\n", static_cast<unsigned long long>(k), p);
        }
        std::printf("    E = %.12g\n", q.expectation);
    }
}

struct RunFlags {
    std::string encoding = "bitwise";
    bool stats = false;
    bool with_oracle = false;
    bool pretty = false;
    double timeout_sec = 0.0;
    uint64_t max_paths = oracle::kDefaultPathCap;
    std::string dot_path;
};

int cmd_run(const std::string& path, const RunFlags& flags) {
    std::string source = read_file(path);
    lang::Program prog = lang::parse(source);

    lang::RunResult result;
    double wall_ms = 0.0;
    std::string dot_text;
    auto work = [&]() {
        lang::RunOptions options;
        std::ostringstream dot;
        if (!flags.dot_path.empty()) options.dot = &dot;
        auto start = std::chrono::steady_clock::now();
        result = lang::run_parsed(prog, parse_encoding(flags.encoding), options);
        wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        dot_text = dot.str();
    };
    if (flags.timeout_sec > 0.0) {
        std::packaged_task<void()> task(work);
        std::future<void> done = task.get_future();
        std::thread worker(std::move(task));
        if (done.wait_for(std::chrono::duration<double>(flags.timeout_sec)) !=
            std::future_status::ready) {
            worker.detach();
            json out{{"error", {{"kind", "timeout"}, {"message", "run exceeded the timeout"}}}};
            std::cout << out.dump() << "\n";
            return kExitTimeout;
        }
        worker.join();
        done.get();
    } else {
        work();
    }

    if (!flags.dot_path.empty()) {
        std::ofstream dot_out(flags.dot_path);
        dot_out << dot_text;
    }

    json report;
    report["program"] = path;
    report["encoding"] = flags.encoding;
    report["evidence_probability"] = sig12(result.evidence_probability);
    report["queries"] = queries_to_json(result.queries);
    if (flags.stats) {
        report["stats"] = {{"decision_nodes", result.decision_nodes},
                           {"flip_count", result.flip_count},
                           {"wall_ms", sig12(wall_ms)}};
    }
    if (flags.with_oracle) {
        try {
            oracle::OracleResult truth = oracle::enumerate(prog, flags.max_paths);
            json oracle_queries = json::array();
            for (auto& q : truth.queries) {
                json item{{"expr", q.label}};
                if (q.kind == oracle::OracleQuery::Kind::Probability) {
                    item["probability"] = sig12(q.probability);
                } else {
                    json dist = json::object();
                    for (auto& [k, p] : q.distribution) dist[std::to_string(k)] = sig12(p);
                    item["distribution"] = std::move(dist);
                }
                oracle_queries.push_back(std::move(item));
            }
            report["oracle"] = {
                {"evidence_probability", sig12(truth.evidence_probability)},
                {"queries", std::move(oracle_queries)},
                {"max_abs_deviation", sig12(max_deviation(result.queries, truth.queries))}};
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::EnumerationTooLarge) throw;
            report["oracle"] = {{"skipped", error_kind_name(e.kind())}};
        }
    }

    if (flags.pretty) {
        std::printf("%s (%s encoding)\n", path.c_str(), flags.encoding.c_str());
        std::printf("  evidence probability = %.12g\n", result.evidence_probability);
        pretty_queries(result.queries);
        if (flags.stats) {
            std::printf("  decision nodes = %zu, flips = %u, wall = %.2f ms\n",
                        result.decision_nodes, result.flip_count, wall_ms);
        }
        if (report.contains("oracle") && report["oracle"].contains("max_abs_deviation")) {
            std::printf("  oracle max abs deviation = %g\n",
                        report["oracle"]["max_abs_deviation"].get<double>());
        }
    } else {
        std::cout << report.dump() << "\n";
    }
    return 0;
}

struct BenchFlags {
    uint32_t max_bits = 14;
    uint32_t digits = 10;
    int bits = -1;  // categ-vs-bitwise: a single width
    int reps = 5;
    double timeout_sec = 60.0;
    uint64_t seed = 1234;
    std::string csv_path;
    bool pretty = false;
};

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& lines) {
    std::ofstream out(path);
    out << header << "\n";
    for (const std::string& line : lines) out << line << "\n";
}

int cmd_bench(const std::string& suite, const BenchFlags& flags) {
    json report;
    report["suite"] = suite;
    report["seed"] = flags.seed;
    report["reps"] = flags.reps;
    std::vector<std::string> csv_lines;
    std::string csv_header;

    if (suite == "lt" || suite == "eq" || suite == "plus-expectation") {
        bench::SweepOp op = suite == "lt"   ? bench::SweepOp::Lt
                            : suite == "eq" ? bench::SweepOp::Eq
                                            : bench::SweepOp::PlusExpectation;
        auto rows = bench::sweep_op(op, flags.max_bits, flags.reps, flags.timeout_sec,
                                    flags.seed);
        json arr = json::array();
        csv_header = "bits,wall_ms,node_count,value,timed_out";
        for (auto& r : rows) {
            arr.push_back({{"bits", r.bits},
                           {"wall_ms", sig12(r.wall_ms)},
                           {"node_count", r.node_count},
                           {"value", sig12(r.value)},
                           {"timed_out", r.timed_out}});
            std::ostringstream line;
            line << r.bits << "," << r.wall_ms << "," << r.node_count << "," << r.value
                 << "," << (r.timed_out ? 1 : 0);
            csv_lines.push_back(line.str());
            if (flags.pretty) {
                std::printf("bits=%2u  %10.3f ms  %10zu nodes  value=%.8g%s\n", r.bits,
                            r.wall_ms, r.node_count, r.value,
                            r.timed_out ? "  TIMEOUT" : "");
            }
        }
        report["rows"] = std::move(arr);
    } else if (suite == "categ-vs-bitwise") {
        std::vector<uint32_t> widths;
        if (flags.bits > 0) {
            widths.push_back(static_cast<uint32_t>(flags.bits));
        } else {
            for (uint32_t b = 1; b <= flags.max_bits; ++b) widths.push_back(b);
        }
        auto rows = bench::sweep_categ_vs_bitwise(widths, flags.seed);
        json arr = json::array();
        csv_header = "bits,categ_nodes,bitwise_nodes,categ_ms,bitwise_ms";
        for (auto& r : rows) {
            arr.push_back({{"bits", r.bits},
                           {"categ_nodes", r.categ_nodes},
                           {"bitwise_nodes", r.bitwise_nodes},
                           {"categ_ms", sig12(r.categ_ms)},
                           {"bitwise_ms", sig12(r.bitwise_ms)}});
            std::ostringstream line;
            line << r.bits << "," << r.categ_nodes << "," << r.bitwise_nodes << ","
                 << r.categ_ms << "," << r.bitwise_ms;
            csv_lines.push_back(line.str());
            if (flags.pretty) {
                std::printf(
                    "bits=%2u  categ %10zu nodes (%8.2f ms)  bitwise %8zu nodes (%8.2f ms)\n",
                    r.bits, r.categ_nodes, r.categ_ms, r.bitwise_nodes, r.bitwise_ms);
            }
        }
        report["rows"] = std::move(arr);
    } else if (suite == "luhn") {
        auto rows = bench::sweep_luhn(flags.digits, flags.reps, flags.timeout_sec);
        json arr = json::array();
        csv_header = "digits,wall_ms,node_count,max_abs_dev,oracle_checked,timed_out";
        for (auto& r : rows) {
            arr.push_back({{"digits", r.digits},
                           {"wall_ms", sig12(r.wall_ms)},
                           {"node_count", r.node_count},
                           {"max_abs_dev", sig12(r.max_abs_dev)},
                           {"oracle_checked", r.oracle_checked},
                           {"timed_out", r.timed_out}});
            std::ostringstream line;
            line << r.digits << "," << r.wall_ms << "," << r.node_count << ","
                 << r.max_abs_dev << "," << (r.oracle_checked ? 1 : 0) << ","
                 << (r.timed_out ? 1 : 0);
            csv_lines.push_back(line.str());
            if (flags.pretty) {
                std::printf("digits=%2u  %10.3f ms  %8zu nodes%s%s\n", r.digits, r.wall_ms,
                            r.node_count, r.oracle_checked ? "  (oracle checked)" : "",
                            r.timed_out ? "  TIMEOUT" : "");
            }
        }
        report["rows"] = std::move(arr);
    } else {
        std::cerr << "unknown suite '" << suite << "'\n";
        return kExitFailure;
    }

    if (!flags.csv_path.empty()) write_csv(flags.csv_path, csv_header, csv_lines);
    if (!flags.pretty) std::cout << report.dump() << "\n";
    return 0;
}

struct CorpusFlags {
    std::string dir = PROBBITS_CORPUS_DIR;
    std::string filter;
    std::string encoding = "bitwise";
    uint64_t max_paths = oracle::kDefaultPathCap;
};

int cmd_corpus(const CorpusFlags& flags) {
    static const char* kPrograms[] = {
        "discrete4",      "luhn2",       "luhn4",        "luhn9",          "gcd-small",
        "triangle-small", "beta-single", "beta-missing", "survey-network",
    };
    int failures = 0;
    for (const char* name : kPrograms) {
        if (!flags.filter.empty() &&
            std::string(name).find(flags.filter) == std::string::npos) {
            continue;
        }
        fs::path path = fs::path(flags.dir) / (std::string(name) + ".pb");
        try {
            lang::Program prog = lang::parse(read_file(path.string()));
            auto start = std::chrono::steady_clock::now();
            lang::RunResult primary = lang::run_parsed(prog, parse_encoding(flags.encoding));
            lang::RunResult other = lang::run_parsed(
                prog, flags.encoding == "categ" ? lang::Encoding::Bitwise
                                                : lang::Encoding::Categ);
            double wall_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();

            double cross_dev =
                std::abs(primary.evidence_probability - other.evidence_probability);
            for (size_t i = 0; i < primary.queries.size(); ++i) {
                if (primary.queries[i].kind == lang::Output::Kind::Probability) {
                    cross_dev = std::max(cross_dev,
                                         std::abs(primary.queries[i].probability -
                                                  other.queries[i].probability));
                } else {
                    for (auto& [k, p] : primary.queries[i].distribution) {
                        double got = other.queries[i].distribution.count(k)
                                         ? other.queries[i].distribution.at(k)
                                         : 0.0;
                        cross_dev = std::max(cross_dev, std::abs(got - p));
                    }
                }
            }

            bool oracle_checked = false;
            double oracle_dev = 0.0;
            try {
                oracle::OracleResult truth = oracle::enumerate(prog, flags.max_paths);
                oracle_dev = max_deviation(primary.queries, truth.queries);
                oracle_dev = std::max(oracle_dev, std::abs(primary.evidence_probability -
                                                           truth.evidence_probability));
                oracle_checked = true;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::EnumerationTooLarge) throw;
            }

            bool ok = cross_dev < 1e-9 && (!oracle_checked || oracle_dev < 1e-9);
            if (!ok) ++failures;
            if (oracle_checked) {
                std::printf("[%s] %-15s %8.1f ms  encodings dev %.2e  oracle dev %.2e\n",
                            ok ? "PASS" : "FAIL", name, wall_ms, cross_dev, oracle_dev);
            } else {
                std::printf("[%s] %-15s %8.1f ms  encodings dev %.2e  (oracle skipped: "
                            "too many paths)\n",
                            ok ? "PASS" : "FAIL", name, wall_ms, cross_dev);
            }
        } catch (const Error& e) {
            ++failures;
            std::printf("[FAIL] %-15s error: %s (%s)\n", name, e.what(),
                        error_kind_name(e.kind()));
        }
    }
    if (failures > 0) {
        std::printf("%d corpus failure(s)\n", failures);
        return kExitFailure;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact inference for binary-encoded integer probabilistic programs"};
    app.require_subcommand(1);

    RunFlags run_flags;
    std::string run_path;
    CLI::App* run = app.add_subcommand("run", "run a program and print query results");
    run->add_option("file", run_path, "program file")->required();
    run->add_option("--encoding", run_flags.encoding, "integer encoding")
        ->check(CLI::IsMember({"bitwise", "categ"}))
        ->capture_default_str();
    run->add_flag("--stats", run_flags.stats, "include BDD statistics");
    run->add_flag("--oracle", run_flags.with_oracle,
                  "also run the enumeration oracle and report the deviation");
    run->add_flag("--pretty", run_flags.pretty, "human-readable output");
    run->add_option("--timeout-sec", run_flags.timeout_sec, "abort after this many seconds");
    run->add_option("--max-paths", run_flags.max_paths, "oracle enumeration cap");
    run->add_option("--dot", run_flags.dot_path, "write a DOT dump of the compiled DAG");

    BenchFlags bench_flags;
    std::string suite;
    CLI::App* bench = app.add_subcommand("bench", "run a scaling sweep");
    bench->add_option("suite", suite, "lt | eq | plus-expectation | luhn | categ-vs-bitwise")
        ->required();
    bench->add_option("--max-bits", bench_flags.max_bits, "largest bit width")
        ->capture_default_str();
    bench->add_option("--digits", bench_flags.digits, "largest luhn digit count")
        ->capture_default_str();
    bench->add_option("--bits", bench_flags.bits, "categ-vs-bitwise: single width");
    bench->add_option("--reps", bench_flags.reps, "repetitions per cell (median reported)")
        ->capture_default_str();
    bench->add_option("--timeout-sec", bench_flags.timeout_sec, "per-cell timeout")
        ->capture_default_str();
    bench->add_option("--seed", bench_flags.seed, "seed for the random vectors")
        ->capture_default_str();
    bench->add_option("--csv", bench_flags.csv_path, "also write comma-delimited rows");
    bench->add_flag("--pretty", bench_flags.pretty, "human-readable table");

    CorpusFlags corpus_flags;
    CLI::App* corpus = app.add_subcommand("corpus", "run the shipped example programs");
    corpus->add_option("--dir", corpus_flags.dir, "corpus directory")->capture_default_str();
    corpus->add_option("--filter", corpus_flags.filter, "run only matching programs");
    corpus->add_option("--encoding", corpus_flags.encoding, "primary encoding")
        ->check(CLI::IsMember({"bitwise", "categ"}))
        ->capture_default_str();
    corpus->add_option("--max-paths", corpus_flags.max_paths, "oracle enumeration cap");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_path, run_flags);
        if (bench->parsed()) return cmd_bench(suite, bench_flags);
        if (corpus->parsed()) return cmd_corpus(corpus_flags);
    } catch (const Error& e) {
        std::cout << error_json(e).dump() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cout << json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
