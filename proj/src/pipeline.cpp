#include "tjflow/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tjflow/errors.hpp"
#include "tjflow/rng.hpp"
#include "tjflow/text.hpp"

namespace tjflow {

SplitResult shuffle_split(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
    const long n = static_cast<long>(dataset.samples.size());
    if (n < 5) throw ValidationError("too few samples to split (need >= 5)");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ValidationError("train_fraction must lie in (0, 1)");
    std::vector<long> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    rng.shuffle(perm);
    const long n_train = std::llround(train_fraction * static_cast<double>(n));
    SplitResult split;
    split.train.grid = split.test.grid = dataset.grid;
    split.train.samples.reserve(n_train);
    split.test.samples.reserve(n - n_train);
    for (long i = 0; i < n; ++i)
        (i < n_train ? split.train : split.test).samples.push_back(dataset.samples[perm[i]]);
    return split;
}

Matrix feature_matrix(const Dataset& dataset) {
    const long n = static_cast<long>(dataset.samples.size());
    const int p = dataset.grid.nx * dataset.grid.ny;
    Matrix X(n, p);
    for (long i = 0; i < n; ++i) {
        const auto& v = dataset.samples[i].values;
        if (static_cast<int>(v.size()) != p)
            throw ValidationError("sample grid size mismatch");
        std::copy(v.begin(), v.end(), X.data.begin() + static_cast<std::size_t>(i) * p);
    }
    return X;
}

OriginModels train_origin_models(const Dataset& train, const ForestParams& params) {
    if (train.samples.empty()) throw ValidationError("empty training set");
    const Matrix X = feature_matrix(train);
    const long n = X.rows;
    std::vector<double> y_left(n), y_right(n);
    for (long i = 0; i < n; ++i) {
        y_left[i] = 100.0 * train.samples[i].label.frac_left();
        y_right[i] = 100.0 * train.samples[i].label.frac_right();
    }
    // Both forests share one seed stream, so tree t sees the same bootstrap
    // for both origins. With complementary targets the split decisions
    // coincide and the raw per-origin predictions already sum to ~100;
    // normalization then only fixes clamping artifacts.
    OriginModels models;
    models.grid = train.grid;
    models.left = fit_forest(X, y_left, params);
    models.right = fit_forest(X, y_right, params);
    return models;
}

std::pair<double, double> predict_distribution(const OriginModels& models,
                                               std::span<const double> values) {
    const double raw_left = std::clamp(models.left.predict(values), 0.0, 100.0);
    const double raw_right = std::clamp(models.right.predict(values), 0.0, 100.0);
    const double sum = raw_left + raw_right;
    if (sum <= 0.0) return {50.0, 50.0};
    // ratio first: raw/sum <= 1 exactly, so the scaled value stays <= 100
    return {100.0 * (raw_left / sum), 100.0 * (raw_right / sum)};
}

double relative_error(std::pair<double, double> y, std::pair<double, double> y_hat) {
    const double dl = y.first - y_hat.first;
    const double dr = y.second - y_hat.second;
    return 100.0 * std::sqrt(dl * dl + dr * dr) / kMaxEuclideanError;
}

const char* eval_mode_name(EvalMode mode) {
    switch (mode) {
        case EvalMode::Sim: return "sim";
        case EvalMode::Exp: return "exp";
        default: return "hybrid";
    }
}

EvalMode eval_mode_from_name(const std::string& name) {
    if (name == "sim") return EvalMode::Sim;
    if (name == "exp") return EvalMode::Exp;
    if (name == "hybrid") return EvalMode::Hybrid;
    throw ValidationError("unknown mode '" + name + "' (expected sim|exp|hybrid)");
}

EvalReport run_experiment(EvalMode mode, const Dataset& train_source,
                          const Dataset& test_source, int n_runs, std::uint64_t base_seed,
                          const ForestParams& forest_params) {
    if (n_runs < 1) throw ValidationError("n_runs must be >= 1");
    if (!(train_source.grid == test_source.grid))
        throw ValidationError("grid metadata mismatch between train and test sources");

    EvalReport report;
    report.mode = mode;
    for (int run = 0; run < n_runs; ++run) {
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(run);
        SplitResult split = shuffle_split(train_source, 0.8, seed);
        const Dataset& test = mode == EvalMode::Hybrid ? test_source : split.test;

        ForestParams fp = forest_params;
        fp.seed = seed;
        const OriginModels models = train_origin_models(split.train, fp);

        std::vector<double> errors;
        errors.reserve(test.samples.size());
        for (const HeatmapSample& s : test.samples) {
            const auto pred = predict_distribution(models, s.values);
            const std::pair<double, double> truth{100.0 * s.label.frac_left(),
                                                  100.0 * s.label.frac_right()};
            errors.push_back(relative_error(truth, pred));
        }
        double mean = 0.0;
        for (const double e : errors) mean += e;
        mean /= static_cast<double>(errors.size());
        double var = 0.0;
        for (const double e : errors) var += (e - mean) * (e - mean);
        var /= static_cast<double>(errors.size());

        const Matrix X_train = feature_matrix(split.train);
        std::vector<double> y_left(X_train.rows), y_right(X_train.rows);
        for (long i = 0; i < X_train.rows; ++i) {
            y_left[i] = 100.0 * split.train.samples[i].label.frac_left();
            y_right[i] = 100.0 * split.train.samples[i].label.frac_right();
        }
        RunResult r;
        r.seed = seed;
        r.mean_error = mean;
        r.stdev_error = std::sqrt(var);
        r.oob_r2_left = oob_scores(models.left, X_train, y_left).r2;
        r.oob_r2_right = oob_scores(models.right, X_train, y_right).r2;
        r.n_train = static_cast<long>(split.train.samples.size());
        r.n_test = static_cast<long>(test.samples.size());
        report.runs.push_back(r);
    }
    return report;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
    out << "mode,run,seed,n_train,n_test,mean_error,stdev_error,oob_r2_left,oob_r2_right\n";
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        const RunResult& r = report.runs[i];
        out << eval_mode_name(report.mode) << ',' << (i + 1) << ',' << r.seed << ','
            << r.n_train << ',' << r.n_test << ',' << format_double(r.mean_error) << ','
            << format_double(r.stdev_error) << ',' << format_double(r.oob_r2_left) << ','
            << format_double(r.oob_r2_right) << '\n';
    }
}

EvalReport read_report_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty report", 1);
    EvalReport report;
    long line_no = 1;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 9) throw ParseError("expected 9 report fields", line_no);
        if (first) {
            report.mode = eval_mode_from_name(fields[0]);
            first = false;
        }
        RunResult r;
        r.seed = static_cast<std::uint64_t>(parse_int(fields[2], line_no));
        r.n_train = parse_int(fields[3], line_no);
        r.n_test = parse_int(fields[4], line_no);
        r.mean_error = parse_double(fields[5], line_no);
        r.stdev_error = parse_double(fields[6], line_no);
        r.oob_r2_left = parse_double(fields[7], line_no);
        r.oob_r2_right = parse_double(fields[8], line_no);
        report.runs.push_back(r);
    }
    return report;
}

std::string format_report_table(const EvalReport& report) {
    std::ostringstream out;
    char buf[64];
    out << "Relative error of random forest prediction (mode=" << eval_mode_name(report.mode)
        << ")\n";
    out << "                       ";
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "  Run %-3zu", i + 1);
        out << buf;
    }
    out << "\nMean Euclidean error   ";
    for (const RunResult& r : report.runs) {
        std::snprintf(buf, sizeof(buf), "  %6.2f%%", r.mean_error);
        out << buf;
    }
    out << "\nStdev Euclidean error  ";
    for (const RunResult& r : report.runs) {
        std::snprintf(buf, sizeof(buf), "  %6.2f%%", r.stdev_error);
        out << buf;
    }
    out << '\n';
    return out.str();
}

} // namespace tjflow
