#include "probbits/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <memory>
#include <random>
#include <sstream>
#include <thread>

#include "probbits/arith.hpp"
#include "probbits/compiler.hpp"
#include "probbits/oracle.hpp"

namespace probbits::bench {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Runs f on its own thread. On timeout the thread is abandoned (it owns all
// its state through the shared pointer held by the closure) and false is
// returned.
bool run_with_timeout(double timeout_sec, std::function<void()> f) {
    if (timeout_sec <= 0.0) {
        f();
        return true;
    }
    std::packaged_task<void()> task(std::move(f));
    std::future<void> done = task.get_future();
    std::thread worker(std::move(task));
    if (done.wait_for(std::chrono::duration<double>(timeout_sec)) ==
        std::future_status::ready) {
        worker.join();
        done.get();  // propagate exceptions
        return true;
    }
    worker.detach();
    return false;
}

std::vector<double> random_positive_vector(std::mt19937_64& rng, size_t len) {
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::vector<double> v(len);
    for (double& x : v) x = unit(rng);
    return v;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return xs[xs.size() / 2];
}

}  // namespace

std::vector<SweepRow> sweep_op(SweepOp op, uint32_t max_bits, int reps,
                               double timeout_sec, uint64_t seed) {
    std::vector<SweepRow> rows;
    bool gave_up = false;
    for (uint32_t b = 1; b <= max_bits; ++b) {
        SweepRow row;
        row.bits = b;
        if (gave_up) {
            row.timed_out = true;
            rows.push_back(row);
            continue;
        }
        // the cell's state lives behind a shared_ptr owned by the closure, and
        // is only read back after a successful join
        auto cell = std::make_shared<SweepRow>(row);
        bool finished = run_with_timeout(timeout_sec, [cell, op, b, reps, seed]() {
            std::vector<double> times;
            for (int rep = 0; rep < std::max(reps, 1); ++rep) {
                std::mt19937_64 rng(seed + b);
                size_t len = size_t{1} << b;
                std::vector<double> va = random_positive_vector(rng, len);
                std::vector<double> vb = random_positive_vector(rng, len);
                auto start = Clock::now();
                Manager m;
                ProbInt x = bitwise_int(m, va);
                ProbInt y = bitwise_int(m, vb);
                switch (op) {
                    case SweepOp::Lt: {
                        NodeRef r = lt(x, y);
                        cell->value = m.wmc(r);
                        cell->node_count = m.node_count(std::vector<NodeRef>{r});
                        break;
                    }
                    case SweepOp::Eq: {
                        NodeRef r = eq(x, y);
                        cell->value = m.wmc(r);
                        cell->node_count = m.node_count(std::vector<NodeRef>{r});
                        break;
                    }
                    case SweepOp::PlusExpectation: {
                        ProbInt s = add(x, y);
                        Evidence none(m);
                        cell->value = expectation(s, none);
                        cell->node_count = m.node_count(s.bits());
                        break;
                    }
                }
                times.push_back(ms_since(start));
            }
            cell->wall_ms = median(std::move(times));
        });
        if (finished) {
            row = *cell;
            row.bits = b;
        } else {
            row.timed_out = true;
            gave_up = true;
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<EncodingRow> sweep_categ_vs_bitwise(const std::vector<uint32_t>& bits,
                                                uint64_t seed) {
    std::vector<EncodingRow> rows;
    for (uint32_t b : bits) {
        std::mt19937_64 rng(seed + b);
        size_t len = size_t{1} << b;
        std::vector<double> v = random_positive_vector(rng, len);
        EncodingRow row;
        row.bits = b;
        {
            auto start = Clock::now();
            Manager m;
            ProbInt x = categ_int(m, v);
            row.categ_nodes = m.node_count(x.bits());
            row.categ_ms = ms_since(start);
        }
        {
            auto start = Clock::now();
            Manager m;
            ProbInt x = bitwise_int(m, v);
            row.bitwise_nodes = m.node_count(x.bits());
            row.bitwise_ms = ms_since(start);
        }
        rows.push_back(row);
    }
    return rows;
}

std::string luhn_source(uint32_t total_digits) {
    // OCR-style digit priors; the first two rows are the confusion profiles of
    // the running student-ID example, the rest keep the sweep generic
    static const char* kPriors[4] = {
        "[0.72, 0.01, 0.01, 0.01, 0.01, 0.01, 0.2, 0.01, 0.01, 0.01]",
        "[0.01, 0.01, 0.05, 0.01, 0.01, 0.63, 0.2, 0.01, 0.01, 0.05]",
        "[0.05, 0.7, 0.05, 0.02, 0.02, 0.02, 0.02, 0.05, 0.02, 0.05]",
        "[0.02, 0.03, 0.1, 0.6, 0.05, 0.05, 0.05, 0.04, 0.03, 0.03]",
    };
    std::ostringstream out;
    out << "// student-ID validation: digit priors from an OCR front end,\n"
        << "// conditioned on the checksum accepting the ID\n";
    for (uint32_t i = 0; i < total_digits; ++i) {
        out << "let id" << i << " = discrete(" << kPriors[i % 4] << ")\n";
    }
    out << "let rest = [";
    for (uint32_t i = 1; i < total_digits; ++i) out << (i > 1 ? ", id" : "id") << i;
    out << "]\n";
    out << "let sum = 0\n";
    out << "for i in 0.." << (total_digits - 1) << " {\n";
    out << "  if i % 2 == 0 {\n";
    out << "    if rest[i] > 4 { sum = sum + (2 * rest[i] - 9) }\n";
    out << "    else { sum = sum + 2 * rest[i] }\n";
    out << "  } else {\n";
    out << "    sum = sum + rest[i]\n";
    out << "  }\n";
    out << "}\n";
    out << "observe((id0 + sum) % 10 == 0)\n";
    out << "return ";
    for (uint32_t i = 0; i < total_digits; ++i) out << (i > 0 ? ", id" : "id") << i;
    out << "\n";
    return out.str();
}

std::vector<LuhnRow> sweep_luhn(uint32_t max_digits, int reps, double timeout_sec,
                                uint32_t oracle_max_digits) {
    std::vector<LuhnRow> rows;
    bool gave_up = false;
    for (uint32_t d = 2; d <= max_digits; ++d) {
        LuhnRow row;
        row.digits = d;
        if (gave_up) {
            row.timed_out = true;
            rows.push_back(row);
            continue;
        }
        auto cell = std::make_shared<LuhnRow>(row);
        bool finished = run_with_timeout(timeout_sec, [cell, d, reps, oracle_max_digits]() {
            std::string source = luhn_source(d);
            lang::Program prog = lang::parse(source);
            std::vector<double> times;
            lang::RunResult run;
            for (int rep = 0; rep < std::max(reps, 1); ++rep) {
                auto start = Clock::now();
                run = lang::run_parsed(prog, lang::Encoding::Bitwise);
                times.push_back(ms_since(start));
            }
            cell->wall_ms = median(std::move(times));
            cell->node_count = run.decision_nodes;
            if (d <= oracle_max_digits) {
                oracle::OracleResult truth = oracle::enumerate(prog);
                double dev = 0.0;
                for (size_t q = 0; q < run.queries.size(); ++q) {
                    for (auto& [k, p] : truth.queries[q].distribution) {
                        double got = run.queries[q].distribution.count(k)
                                         ? run.queries[q].distribution.at(k)
                                         : 0.0;
                        dev = std::max(dev, std::abs(got - p));
                    }
                }
                cell->max_abs_dev = dev;
                cell->oracle_checked = true;
            }
        });
        if (finished) {
            row = *cell;
            row.digits = d;
        } else {
            row.timed_out = true;
            gave_up = true;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace probbits::bench
