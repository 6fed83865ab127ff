#include "aqec/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace aqec {

std::vector<int> Dataset::labels_present() const {
    std::set<int> s;
    for (const Sample& smp : samples) s.insert(smp.label);
    return {s.begin(), s.end()};
}

double Rng::uniform() {
    // 53 random bits into [0, 1).
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

Dataset gen_circles(int classes, int n_points, const std::vector<double>& radii,
                    double noise_std, std::uint64_t seed) {
    if (classes != 2 && classes != 3) {
        throw std::invalid_argument("gen_circles supports 2 or 3 classes");
    }
    if (static_cast<int>(radii.size()) != classes) {
        throw std::invalid_argument("need one radius per class");
    }
    for (int c = 0; c + 1 < classes; ++c) {
        if (!(radii[c] > radii[c + 1])) {
            throw std::invalid_argument("radii must be strictly decreasing");
        }
    }
    if (n_points % classes != 0) {
        throw std::invalid_argument("n_points must be divisible by class count");
    }
    Rng rng(seed);
    Dataset ds;
    ds.dim = 2;
    const int per_class = n_points / classes;
    for (int c = 0; c < classes; ++c) {
        for (int k = 0; k < per_class; ++k) {
            const double theta = 2.0 * std::numbers::pi * rng.uniform();
            RealVector p(2);
            p(0) = radii[c] * std::cos(theta) + noise_std * rng.gaussian();
            p(1) = radii[c] * std::sin(theta) + noise_std * rng.gaussian();
            ds.samples.push_back({p, c});
        }
    }
    return ds;
}

Dataset gen_spirals(int n_points, double turns, double noise_std,
                    std::uint64_t seed) {
    if (n_points % 2 != 0) {
        throw std::invalid_argument("gen_spirals needs an even n_points");
    }
    Rng rng(seed);
    Dataset ds;
    ds.dim = 2;
    const double t_lo = 0.25;
    const double t_hi = turns * 2.0 * std::numbers::pi;
    const double a = 1.0 / t_hi;  // outermost radius 1
    const int per_class = n_points / 2;
    for (int c = 0; c < 2; ++c) {
        for (int k = 0; k < per_class; ++k) {
            const double t = t_lo + (t_hi - t_lo) * rng.uniform();
            const double theta = t + c * std::numbers::pi;
            RealVector p(2);
            p(0) = a * t * std::cos(theta) + noise_std * rng.gaussian();
            p(1) = a * t * std::sin(theta) + noise_std * rng.gaussian();
            ds.samples.push_back({p, c});
        }
    }
    return ds;
}

namespace {

Dataset parse_csv(const std::string& path, bool skip_header,
                  int expected_cols /* -1 = infer from first row */) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Dataset ds;
    std::string line;
    int row = 0;
    int cols = expected_cols;
    while (std::getline(in, line)) {
        ++row;
        if (row == 1 && skip_header) continue;
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ": row " + std::to_string(row) +
                                         ": non-numeric cell '" + cell + "'");
            }
            while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
            if (pos != cell.size()) {
                throw std::runtime_error(path + ": row " + std::to_string(row) +
                                         ": non-numeric cell '" + cell + "'");
            }
            vals.push_back(v);
        }
        if (cols < 0) cols = static_cast<int>(vals.size());
        if (static_cast<int>(vals.size()) != cols) {
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": expected " + std::to_string(cols) +
                                     " columns, got " + std::to_string(vals.size()));
        }
        const int d = cols - 1;
        if (d < 1) throw std::runtime_error(path + ": need at least 2 columns");
        const double lab = vals.back();
        if (lab != std::floor(lab) || lab < 0) {
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     ": label is not a nonnegative integer");
        }
        Sample smp;
        smp.features = Eigen::Map<const RealVector>(vals.data(), d);
        smp.label = static_cast<int>(lab);
        ds.dim = d;
        ds.samples.push_back(std::move(smp));
    }
    return ds;
}

}  // namespace

Dataset load_digits_csv(const std::string& path,
                        const std::optional<std::set<int>>& label_filter,
                        bool skip_header) {
    Dataset all = parse_csv(path, skip_header, 65);
    if (!label_filter) return all;
    Dataset out;
    out.dim = all.dim;
    for (Sample& smp : all.samples) {
        if (label_filter->count(smp.label)) out.samples.push_back(std::move(smp));
    }
    if (out.samples.empty()) {
        throw std::runtime_error(path + ": no samples left after label filter");
    }
    return out;
}

Dataset load_csv(const std::string& path, bool skip_header) {
    return parse_csv(path, skip_header, -1);
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + path);
    for (const Sample& smp : ds.samples) {
        for (Eigen::Index i = 0; i < smp.features.size(); ++i) {
            std::fprintf(f, "%.17g,", smp.features(i));
        }
        std::fprintf(f, "%d\n", smp.label);
    }
    std::fclose(f);
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("train_fraction must be in (0,1)");
    }
    const std::size_t total = ds.samples.size();
    std::vector<std::size_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = i;
    // Fisher-Yates with explicit uniform indices.
    Rng rng(seed);
    for (std::size_t i = total; i > 1; --i) {
        const std::size_t j =
            static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
        std::swap(order[i - 1], order[std::min(j, i - 1)]);
    }
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(total)));
    if (n_train == 0 || n_train >= total) {
        throw std::invalid_argument("split leaves an empty train or test set");
    }
    Dataset train, test;
    train.dim = test.dim = ds.dim;
    for (std::size_t i = 0; i < total; ++i) {
        (i < n_train ? train : test).samples.push_back(ds.samples[order[i]]);
    }
    const auto all_labels = ds.labels_present();
    for (const Dataset* part : {&train, &test}) {
        if (part->labels_present() != all_labels) {
            throw std::runtime_error("split dropped a label from one side");
        }
    }
    return {std::move(train), std::move(test)};
}

std::string to_string(NormalizationMode m) {
    switch (m) {
        case NormalizationMode::None: return "none";
        case NormalizationMode::ScaleToUnit: return "scale_to_unit";
        case NormalizationMode::Standardize: return "standardize";
    }
    return "none";
}

NormalizationMode normalization_mode_from_string(const std::string& s) {
    if (s == "none") return NormalizationMode::None;
    if (s == "scale_to_unit") return NormalizationMode::ScaleToUnit;
    if (s == "standardize") return NormalizationMode::Standardize;
    throw std::invalid_argument("unknown normalization mode: " + s);
}

NormalizationStats fit_normalization(const Dataset& train, NormalizationMode mode,
                                     double scale_constant) {
    NormalizationStats stats;
    stats.mode = mode;
    stats.scale = scale_constant;
    if (mode == NormalizationMode::Standardize) {
        if (train.empty()) throw std::invalid_argument("empty training set");
        const int d = train.dim;
        RealVector mean = RealVector::Zero(d);
        for (const Sample& smp : train.samples) mean += smp.features;
        mean /= static_cast<double>(train.size());
        RealVector var = RealVector::Zero(d);
        for (const Sample& smp : train.samples) {
            var += (smp.features - mean).cwiseAbs2();
        }
        var /= static_cast<double>(train.size());
        stats.mean = mean;
        stats.stddev = var.cwiseSqrt();
        for (int i = 0; i < d; ++i) {
            if (stats.stddev(i) == 0.0) stats.stddev(i) = 1.0;  // pass through
        }
    }
    return stats;
}

RealVector apply_normalization(const NormalizationStats& stats,
                               const RealVector& x) {
    switch (stats.mode) {
        case NormalizationMode::None: return x;
        case NormalizationMode::ScaleToUnit: return x / stats.scale;
        case NormalizationMode::Standardize:
            return (x - stats.mean).cwiseQuotient(stats.stddev);
    }
    return x;
}

Dataset apply_normalization(const NormalizationStats& stats, const Dataset& ds) {
    Dataset out;
    out.dim = ds.dim;
    out.samples.reserve(ds.samples.size());
    for (const Sample& smp : ds.samples) {
        out.samples.push_back({apply_normalization(stats, smp.features), smp.label});
    }
    return out;
}

}  // namespace aqec
