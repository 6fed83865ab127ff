#include "aqec/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aqec {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Flat key/value document with '#' comments. Keys are consumed as they are
// read; anything left over at the end is an unknown key.
class ConfigReader {
public:
    explicit ConfigReader(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                         ": expected key = value");
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) {
                throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                         ": empty key");
            }
            if (!values_.emplace(key, value).second) {
                throw std::invalid_argument(path + ": duplicate key " + key);
            }
        }
        path_ = path;
    }

    std::optional<std::string> take(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        std::string v = it->second;
        values_.erase(it);
        return v;
    }

    template <typename T, typename Parse>
    T take_or(const std::string& key, T fallback, Parse parse) {
        auto v = take(key);
        if (!v) return fallback;
        try {
            return parse(*v);
        } catch (const std::exception& e) {
            throw std::invalid_argument(path_ + ": key " + key + ": " + e.what());
        }
    }

    int take_int(const std::string& key, int fallback) {
        return take_or(key, fallback,
                       [](const std::string& s) { return std::stoi(s); });
    }
    double take_double(const std::string& key, double fallback) {
        return take_or(key, fallback,
                       [](const std::string& s) { return std::stod(s); });
    }
    std::uint64_t take_u64(const std::string& key, std::uint64_t fallback) {
        return take_or(key, fallback,
                       [](const std::string& s) { return std::stoull(s); });
    }
    std::string take_string(const std::string& key, const std::string& fallback) {
        return take_or(key, fallback, [](const std::string& s) { return s; });
    }
    bool take_bool(const std::string& key, bool fallback) {
        return take_or(key, fallback, [](const std::string& s) {
            if (s == "true" || s == "1") return true;
            if (s == "false" || s == "0") return false;
            throw std::invalid_argument("expected true/false");
        });
    }
    std::vector<double> take_double_list(const std::string& key,
                                         std::vector<double> fallback) {
        return take_or(key, std::move(fallback), [](const std::string& s) {
            std::vector<double> out;
            for (const std::string& item : split_list(s)) out.push_back(std::stod(item));
            return out;
        });
    }
    std::vector<int> take_int_list(const std::string& key,
                                   std::vector<int> fallback) {
        return take_or(key, std::move(fallback), [](const std::string& s) {
            std::vector<int> out;
            for (const std::string& item : split_list(s)) out.push_back(std::stoi(item));
            return out;
        });
    }
    std::vector<std::uint64_t> take_u64_list(const std::string& key,
                                             std::vector<std::uint64_t> fallback) {
        return take_or(key, std::move(fallback), [](const std::string& s) {
            std::vector<std::uint64_t> out;
            for (const std::string& item : split_list(s)) out.push_back(std::stoull(item));
            return out;
        });
    }

    void reject_leftovers() const {
        if (values_.empty()) return;
        std::string keys;
        for (const auto& [k, v] : values_) keys += (keys.empty() ? "" : ", ") + k;
        throw std::invalid_argument(path_ + ": unknown config keys: " + keys);
    }

private:
    std::map<std::string, std::string> values_;
    std::string path_;
};

}  // namespace

std::vector<double> DatasetConfig::effective_radii() const {
    if (!radii.empty()) return radii;
    return classes == 3 ? std::vector<double>{1.0, 0.65, 0.3}
                        : std::vector<double>{1.0, 0.5};
}

RunConfig RunConfig::load(const std::string& path) {
    ConfigReader r(path);
    RunConfig cfg;

    cfg.qubits = r.take_int("anneal.qubits", cfg.qubits);
    cfg.sine_terms = r.take_int("anneal.sine_terms", cfg.sine_terms);
    cfg.steps = r.take_int("anneal.steps", cfg.steps);
    cfg.t_max = r.take_double("anneal.t_max", cfg.t_max);
    cfg.coeff_source = r.take_string("anneal.coeff_source", cfg.coeff_source);
    cfg.step_sampling = r.take_string("anneal.step_sampling", cfg.step_sampling);
    cfg.fixed_hx = r.take_double_list("anneal.fixed_hx", {});
    cfg.fixed_hz = r.take_double_list("anneal.fixed_hz", {});
    cfg.fixed_j = r.take_double_list("anneal.fixed_j", {});

    cfg.train.epochs = r.take_int("train.epochs", cfg.train.epochs);
    cfg.train.learning_rate = r.take_double("train.learning_rate", cfg.train.learning_rate);
    cfg.train.adam_beta1 = r.take_double("train.beta1", cfg.train.adam_beta1);
    cfg.train.adam_beta2 = r.take_double("train.beta2", cfg.train.adam_beta2);
    cfg.train.adam_eps = r.take_double("train.eps", cfg.train.adam_eps);
    cfg.train.loss_kind = loss_kind_from_string(
        r.take_string("train.loss", to_string(cfg.train.loss_kind)));
    cfg.train.w_init_scale = r.take_double("train.w_init_scale", cfg.train.w_init_scale);
    cfg.train.rng_seed = r.take_u64("train.seed", cfg.train.rng_seed);

    cfg.data.source = r.take_string("data.source", cfg.data.source);
    cfg.data.classes = r.take_int("data.classes", cfg.data.classes);
    cfg.data.train_points = r.take_int("data.train_points", cfg.data.train_points);
    cfg.data.test_points = r.take_int("data.test_points", cfg.data.test_points);
    cfg.data.radii = r.take_double_list("data.radii", {});
    cfg.data.noise_std = r.take_double("data.noise_std", cfg.data.noise_std);
    cfg.data.turns = r.take_double("data.turns", cfg.data.turns);
    cfg.data.seed = r.take_u64("data.seed", cfg.data.seed);
    cfg.data.train_csv = r.take_string("data.train_csv", "");
    cfg.data.test_csv = r.take_string("data.test_csv", "");
    cfg.data.digits_csv = r.take_string("data.digits_csv", "");
    const std::vector<int> filter = r.take_int_list("data.label_filter", {});
    cfg.data.label_filter = {filter.begin(), filter.end()};
    cfg.data.train_fraction = r.take_double("data.train_fraction", cfg.data.train_fraction);
    cfg.data.header = r.take_bool("data.header", cfg.data.header);
    cfg.data.normalization = normalization_mode_from_string(
        r.take_string("data.normalization", to_string(cfg.data.normalization)));
    cfg.data.scale_constant = r.take_double("data.scale_constant", cfg.data.scale_constant);

    cfg.seeds = r.take_u64_list("experiment.seeds", cfg.seeds);
    cfg.qubit_list = r.take_int_list("experiment.qubits", {});
    cfg.out_dir = r.take_string("output.dir", cfg.out_dir);
    cfg.snapshots = r.take_bool("output.snapshots", cfg.snapshots);

    r.reject_leftovers();

    cfg.make_spec().validate();  // fail fast on inconsistent anneal settings
    cfg.train.validate();
    return cfg;
}

AnnealSpec RunConfig::make_spec(int qubits_override) const {
    const int n = qubits_override > 0 ? qubits_override : qubits;
    AnnealSpec spec = default_spec(n, sine_terms, steps, t_max);
    spec.coeff_source = coeff_source_from_string(coeff_source);
    spec.step_sampling = step_sampling_from_string(step_sampling);
    auto to_vec = [](const std::vector<double>& v) {
        return Eigen::Map<const RealVector>(v.data(), static_cast<Eigen::Index>(v.size()))
            .eval();
    };
    if (!fixed_hx.empty()) spec.fixed_hx = to_vec(fixed_hx);
    if (!fixed_hz.empty()) spec.fixed_hz = to_vec(fixed_hz);
    if (!fixed_j.empty()) spec.fixed_j = to_vec(fixed_j);
    spec.validate();
    return spec;
}

RunConfig::LoadedData RunConfig::load_data() const {
    Dataset train, test;
    if (data.source == "circles") {
        train = gen_circles(data.classes, data.train_points, data.effective_radii(),
                            data.noise_std, data.seed);
        test = gen_circles(data.classes, data.test_points, data.effective_radii(),
                           data.noise_std, data.seed + 1);
    } else if (data.source == "spirals") {
        train = gen_spirals(data.train_points, data.turns, data.noise_std, data.seed);
        test = gen_spirals(data.test_points, data.turns, data.noise_std, data.seed + 1);
    } else if (data.source == "digits") {
        std::optional<std::set<int>> filter;
        if (!data.label_filter.empty()) filter = data.label_filter;
        const Dataset all = load_digits_csv(data.digits_csv, filter, data.header);
        std::tie(train, test) = split(all, data.train_fraction, data.seed);
    } else if (data.source == "csv") {
        train = load_csv(data.train_csv, data.header);
        test = load_csv(data.test_csv, data.header);
    } else {
        throw std::invalid_argument("unknown data.source: " + data.source);
    }
    LoadedData out;
    out.norm = fit_normalization(train, data.normalization, data.scale_constant);
    out.train = apply_normalization(out.norm, train);
    out.test = apply_normalization(out.norm, test);
    return out;
}

namespace {

void write_vector(std::FILE* f, const char* name, const RealVector& v) {
    std::fprintf(f, "%s %lld", name, static_cast<long long>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::fprintf(f, " %.17g", v(i));
    }
    std::fprintf(f, "\n");
}

RealVector read_vector(std::istream& in, const std::string& expected) {
    std::string name;
    long long size;
    in >> name >> size;
    if (!in || name != expected) {
        throw std::runtime_error("checkpoint parse error: expected " + expected);
    }
    RealVector v(size);
    for (long long i = 0; i < size; ++i) in >> v(i);
    if (!in) throw std::runtime_error("checkpoint parse error in " + expected);
    return v;
}

}  // namespace

void Checkpoint::save(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fprintf(f, "aqec-checkpoint %d\n", version);
    std::fprintf(f, "qubits %d\n", spec.qubits);
    std::fprintf(f, "sine_terms %d\n", spec.sine_terms);
    std::fprintf(f, "steps %d\n", spec.steps);
    std::fprintf(f, "t_max %.17g\n", spec.t_max);
    std::fprintf(f, "coeff_source %s\n", to_string(spec.coeff_source).c_str());
    std::fprintf(f, "step_sampling %s\n", to_string(spec.step_sampling).c_str());
    write_vector(f, "fixed_hx", spec.fixed_hx);
    write_vector(f, "fixed_hz", spec.fixed_hz);
    write_vector(f, "fixed_j", spec.fixed_j);
    std::fprintf(f, "data_dim %d\n", data_dim);
    std::fprintf(f, "normalization %s\n", to_string(norm.mode).c_str());
    std::fprintf(f, "scale %.17g\n", norm.scale);
    write_vector(f, "norm_mean", norm.mean);
    write_vector(f, "norm_stddev", norm.stddev);
    std::fprintf(f, "train_seed %llu\n", static_cast<unsigned long long>(train_seed));
    std::fprintf(f, "epochs_completed %d\n", epochs_completed);
    std::fprintf(f, "final_loss %.17g\n", final_loss);
    std::fprintf(f, "w %lld %lld\n", static_cast<long long>(w.rows()),
                 static_cast<long long>(w.cols()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            std::fprintf(f, "%s%.17g", j ? " " : "", w(i, j));
        }
        std::fprintf(f, "\n");
    }
    std::fprintf(f, "centroids %zu %lld\n", centroids.size(),
                 centroids.empty() ? 0LL
                                   : static_cast<long long>(centroids[0].matrix.rows()));
    for (const ClassCentroid& c : centroids) {
        std::fprintf(f, "centroid %d %d\n", c.label, c.count);
        const Eigen::Index dim = c.matrix.rows();
        for (int plane = 0; plane < 2; ++plane) {
            for (Eigen::Index i = 0; i < dim; ++i) {
                for (Eigen::Index j = 0; j < dim; ++j) {
                    const double v = plane == 0 ? c.matrix(i, j).real()
                                                : c.matrix(i, j).imag();
                    std::fprintf(f, "%s%.17g", j ? " " : "", v);
                }
                std::fprintf(f, "\n");
            }
        }
    }
    std::fclose(f);
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    Checkpoint ck;
    std::string tag, word;
    in >> tag >> ck.version;
    if (tag != "aqec-checkpoint" || ck.version != 1) {
        throw std::runtime_error(path + ": not a version-1 aqec checkpoint");
    }
    auto expect = [&](const std::string& name) {
        in >> tag;
        if (!in || tag != name) {
            throw std::runtime_error(path + ": expected field " + name);
        }
    };
    expect("qubits"); in >> ck.spec.qubits;
    expect("sine_terms"); in >> ck.spec.sine_terms;
    expect("steps"); in >> ck.spec.steps;
    expect("t_max"); in >> ck.spec.t_max;
    expect("coeff_source"); in >> word;
    ck.spec.coeff_source = coeff_source_from_string(word);
    expect("step_sampling"); in >> word;
    ck.spec.step_sampling = step_sampling_from_string(word);
    ck.spec.fixed_hx = read_vector(in, "fixed_hx");
    ck.spec.fixed_hz = read_vector(in, "fixed_hz");
    ck.spec.fixed_j = read_vector(in, "fixed_j");
    expect("data_dim"); in >> ck.data_dim;
    expect("normalization"); in >> word;
    ck.norm.mode = normalization_mode_from_string(word);
    expect("scale"); in >> ck.norm.scale;
    ck.norm.mean = read_vector(in, "norm_mean");
    ck.norm.stddev = read_vector(in, "norm_stddev");
    unsigned long long seed;
    expect("train_seed"); in >> seed;
    ck.train_seed = seed;
    expect("epochs_completed"); in >> ck.epochs_completed;
    expect("final_loss"); in >> ck.final_loss;
    long long rows, cols;
    expect("w"); in >> rows >> cols;
    ck.w = RealMatrix(rows, cols);
    for (long long i = 0; i < rows; ++i)
        for (long long j = 0; j < cols; ++j) in >> ck.w(i, j);
    std::size_t n_centroids;
    long long dim;
    expect("centroids"); in >> n_centroids >> dim;
    for (std::size_t c = 0; c < n_centroids; ++c) {
        ClassCentroid cen;
        expect("centroid"); in >> cen.label >> cen.count;
        RealMatrix re(dim, dim), im(dim, dim);
        for (long long i = 0; i < dim; ++i)
            for (long long j = 0; j < dim; ++j) in >> re(i, j);
        for (long long i = 0; i < dim; ++i)
            for (long long j = 0; j < dim; ++j) in >> im(i, j);
        cen.matrix = ComplexMatrix(dim, dim);
        cen.matrix.real() = re;
        cen.matrix.imag() = im;
        ck.centroids.push_back(std::move(cen));
    }
    if (!in) throw std::runtime_error(path + ": truncated checkpoint");
    ck.spec.validate();
    return ck;
}

void write_metrics_csv(const std::vector<EpochRecord>& history,
                       const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fprintf(f, "epoch,loss,train_accuracy,wall_ms\n");
    for (const EpochRecord& r : history) {
        std::fprintf(f, "%d,%.17g,%.17g,%.3f\n", r.epoch, r.loss, r.train_accuracy,
                     r.wall_ms);
    }
    std::fclose(f);
}

void write_real_matrix_csv(const RealMatrix& m, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::fprintf(f, "%s%.17g", j ? "," : "", m(i, j));
        }
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

void write_matrix_pgm(const RealMatrix& m, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fprintf(f, "P5\n%lld %lld\n255\n", static_cast<long long>(m.cols()),
                 static_cast<long long>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = std::clamp(m(i, j), 0.0, 1.0);
            const unsigned char px =
                static_cast<unsigned char>(std::lround(v * 255.0));
            std::fwrite(&px, 1, 1, f);
        }
    }
    std::fclose(f);
}

void write_text_file(const std::string& text, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
}

}  // namespace aqec
