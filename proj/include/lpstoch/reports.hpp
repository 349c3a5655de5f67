#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lpstoch/lie.hpp"

namespace lpstoch {

/// Monte-Carlo ensemble statistics of a (possibly vector-valued) observable
/// sampled at a set of time slices. mean and sem are S x w.
struct EnsembleReport {
    long trials = 0;
    std::string observable;
    std::vector<std::string> components;
    std::vector<double> times;
    Mat mean;
    Mat sem;

    int width() const { return static_cast<int>(mean.cols()); }
    int slices() const { return static_cast<int>(mean.rows()); }
    double final_mean(int c) const { return mean(mean.rows() - 1, c); }
    double final_sem(int c) const { return sem(sem.rows() - 1, c); }

    void write_csv(std::ostream& os) const;
    void print_summary(std::ostream& os) const;
};

struct ConvergenceLevel {
    double h = 0.0;
    double discrepancy = 0.0;  // same-level reduced vs projected-unreduced
    double err_vs_ref = 0.0;   // projected-unreduced vs one-level-finer reduced reference
};

struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;  // sorted by decreasing h
    double fitted_order = 0.0;             // log-log slope of err_vs_ref

    void write_csv(std::ostream& os) const;
    void print_summary(std::ostream& os) const;
};

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

void print_check_table(const std::vector<CheckResult>& checks, std::ostream& os);

/// Least-squares slope of log(err) against log(h).
double fit_loglog_order(const std::vector<std::pair<double, double>>& h_err);

}  // namespace lpstoch
