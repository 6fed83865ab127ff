#include "aqec/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace aqec {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir);
}

std::string provenance_text(const RunConfig& cfg) {
    std::ostringstream os;
    os << "generator " << cfg.data.source << "\n";
    if (cfg.data.source == "circles") {
        os << "classes " << cfg.data.classes << "\n";
        os << "train_points " << cfg.data.train_points << "\n";
        os << "test_points " << cfg.data.test_points << "\n";
        os << "radii";
        for (double r : cfg.data.effective_radii()) os << " " << format_double(r);
        os << "\n";
        os << "noise_std " << format_double(cfg.data.noise_std) << "\n";
    } else if (cfg.data.source == "spirals") {
        os << "train_points " << cfg.data.train_points << "\n";
        os << "test_points " << cfg.data.test_points << "\n";
        os << "turns " << format_double(cfg.data.turns) << "\n";
        os << "noise_std " << format_double(cfg.data.noise_std) << "\n";
    } else if (cfg.data.source == "digits") {
        os << "digits_csv " << cfg.data.digits_csv << "\n";
        os << "label_filter";
        for (int l : cfg.data.label_filter) os << " " << l;
        os << "\n";
        os << "train_fraction " << format_double(cfg.data.train_fraction) << "\n";
    }
    os << "data_seed " << cfg.data.seed << "\n";
    os << "normalization " << to_string(cfg.data.normalization) << "\n";
    os << "epochs " << cfg.train.epochs << "\n";
    os << "loss " << to_string(cfg.train.loss_kind) << "\n";
    return os.str();
}

int classify_exception(const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dynamic_cast<const std::invalid_argument*>(&e) ? 1 : 2;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

int cmd_gen_data(const RunConfig& cfg) {
    try {
        ensure_dir(cfg.out_dir);
        const RunConfig::LoadedData data = cfg.load_data();
        write_csv(data.train, cfg.out_dir + "/train.csv");
        write_csv(data.test, cfg.out_dir + "/test.csv");
        write_text_file(provenance_text(cfg), cfg.out_dir + "/provenance.txt");
        std::cout << "wrote " << data.train.size() << " train / " << data.test.size()
                  << " test samples to " << cfg.out_dir << "\n";
        return 0;
    } catch (const std::exception& e) {
        return classify_exception(e);
    }
}

RunOutcome run_single(const RunConfig& cfg, int qubits, std::uint64_t train_seed,
                      const RunConfig::LoadedData& data) {
    const AnnealSpec spec = cfg.make_spec(qubits);
    const EvolutionGrid grid = EvolutionGrid::from_spec(spec);
    TrainConfig tc = cfg.train;
    tc.rng_seed = train_seed;

    RunOutcome out;
    out.result = train(data.train, spec, grid, tc);
    const PauliBasis basis = PauliBasis::build(spec.qubits);
    out.train_accuracy = out.result.history.back().train_accuracy;
    out.test_accuracy = evaluate(data.test, out.result.state.w, out.result.centroids,
                                 spec, basis, grid);
    return out;
}

void write_snapshots(const AnnealSpec& spec, const PauliBasis& basis,
                     const RealMatrix& w, const Dataset& train,
                     const EvolutionGrid& grid, const std::string& dir) {
    ensure_dir(dir);
    const BatchForward fwd = forward_batch(spec, basis, w, train, grid);
    const std::vector<std::size_t> order = label_grouped_order(fwd.labels);
    for (int t = 0; t <= grid.steps; ++t) {
        std::vector<QuantumState> states;
        states.reserve(order.size());
        for (std::size_t idx : order) {
            states.push_back(fwd.trajectories[idx].states[t]);
        }
        const RealMatrix ov = overlap_matrix(states);
        char name[64];
        std::snprintf(name, sizeof(name), "/overlap_%03d", t);
        write_real_matrix_csv(ov, dir + name + ".csv");
        write_matrix_pgm(ov, dir + name + ".pgm");
    }
}

int cmd_train(const RunConfig& cfg) {
    try {
        ensure_dir(cfg.out_dir);
        const RunConfig::LoadedData data = cfg.load_data();
        write_text_file(provenance_text(cfg), cfg.out_dir + "/provenance.txt");

        std::vector<double> train_accs, test_accs;
        std::ostringstream summary;
        summary << "seed,final_loss,train_accuracy,test_accuracy\n";
        for (std::uint64_t seed : cfg.seeds) {
            const RunOutcome outcome = run_single(cfg, cfg.qubits, seed, data);
            const std::string seed_dir = cfg.out_dir + "/seed_" + std::to_string(seed);
            ensure_dir(seed_dir);
            write_metrics_csv(outcome.result.history, seed_dir + "/metrics.csv");

            Checkpoint ck;
            ck.spec = cfg.make_spec();
            ck.data_dim = data.train.dim;
            ck.norm = data.norm;
            ck.train_seed = seed;
            ck.epochs_completed = static_cast<int>(outcome.result.history.size());
            ck.final_loss = outcome.result.history.back().loss;
            ck.w = outcome.result.state.w;
            ck.centroids = outcome.result.centroids;
            ck.save(seed_dir + "/checkpoint.txt");

            if (cfg.snapshots) {
                const AnnealSpec spec = cfg.make_spec();
                write_snapshots(spec, PauliBasis::build(spec.qubits),
                                outcome.result.state.w, data.train,
                                EvolutionGrid::from_spec(spec),
                                seed_dir + "/snapshots");
            }
            summary << seed << "," << format_double(outcome.result.history.back().loss)
                    << "," << format_double(outcome.train_accuracy) << ","
                    << format_double(outcome.test_accuracy) << "\n";
            train_accs.push_back(outcome.train_accuracy);
            test_accs.push_back(outcome.test_accuracy);
            std::cout << "seed " << seed << ": train " << outcome.train_accuracy
                      << " test " << outcome.test_accuracy << "\n";
        }
        summary << "mean," << "," << format_double(mean(train_accs)) << ","
                << format_double(mean(test_accs)) << "\n";
        write_text_file(summary.str(), cfg.out_dir + "/summary.csv");
        std::cout << "mean train " << mean(train_accs) << " mean test "
                  << mean(test_accs) << "\n";
        return 0;
    } catch (const std::exception& e) {
        return classify_exception(e);
    }
}

int cmd_eval(const std::string& checkpoint_path, const std::string& dataset_csv,
             const std::string& report_path) {
    try {
        const Checkpoint ck = Checkpoint::load(checkpoint_path);
        const Dataset raw = load_csv(dataset_csv);
        if (raw.dim != ck.data_dim) {
            throw std::invalid_argument(
                "dataset dimension " + std::to_string(raw.dim) +
                " does not match checkpoint dimension " + std::to_string(ck.data_dim));
        }
        const Dataset ds = apply_normalization(ck.norm, raw);
        const PauliBasis basis = PauliBasis::build(ck.spec.qubits);
        const EvolutionGrid grid = EvolutionGrid::from_spec(ck.spec);

        std::map<int, std::map<int, int>> confusion;
        std::size_t correct = 0;
        for (const Sample& smp : ds.samples) {
            const int pred = predict(smp.features, ck.w, ck.centroids, ck.spec,
                                     basis, grid);
            ++confusion[smp.label][pred];
            if (pred == smp.label) ++correct;
        }
        const double acc = static_cast<double>(correct) / static_cast<double>(ds.size());

        std::ostringstream report;
        report << "accuracy " << format_double(acc) << "\n";
        report << "confusion (rows = true label, cols = predicted)\n";
        std::vector<int> labels;
        for (const ClassCentroid& c : ck.centroids) labels.push_back(c.label);
        for (int t : labels) {
            report << t << ":";
            for (int p : labels) report << " " << confusion[t][p];
            report << "\n";
        }
        std::cout << report.str();
        if (!report_path.empty()) write_text_file(report.str(), report_path);
        return 0;
    } catch (const std::exception& e) {
        return classify_exception(e);
    }
}

int cmd_predict(const std::string& checkpoint_path, const std::string& input_csv,
                const std::string& output_csv) {
    try {
        const Checkpoint ck = Checkpoint::load(checkpoint_path);
        const PauliBasis basis = PauliBasis::build(ck.spec.qubits);
        const EvolutionGrid grid = EvolutionGrid::from_spec(ck.spec);

        // Feature-only rows: d columns (a trailing label column is also
        // accepted and ignored).
        std::ifstream in(input_csv);
        if (!in) throw std::runtime_error("cannot open " + input_csv);
        std::ostringstream out;
        std::string line;
        int row = 0;
        while (std::getline(in, line)) {
            ++row;
            if (line.empty()) continue;
            std::vector<double> vals;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                try {
                    vals.push_back(std::stod(cell));
                } catch (const std::exception&) {
                    throw std::invalid_argument(input_csv + ": row " +
                                                std::to_string(row) +
                                                ": non-numeric cell '" + cell + "'");
                }
            }
            if (static_cast<int>(vals.size()) != ck.data_dim &&
                static_cast<int>(vals.size()) != ck.data_dim + 1) {
                throw std::invalid_argument(
                    input_csv + ": row " + std::to_string(row) + ": expected " +
                    std::to_string(ck.data_dim) + " feature columns, got " +
                    std::to_string(vals.size()));
            }
            const RealVector x =
                Eigen::Map<const RealVector>(vals.data(), ck.data_dim);
            const int pred = predict(apply_normalization(ck.norm, x), ck.w,
                                     ck.centroids, ck.spec, basis, grid);
            std::cout << pred << "\n";
            out << pred << "\n";
        }
        if (!output_csv.empty()) write_text_file(out.str(), output_csv);
        return 0;
    } catch (const std::exception& e) {
        return classify_exception(e);
    }
}

GradCheckReport run_grad_check(const GradCheckOptions& opt) {
    GradCheckReport report;
    Rng rng(opt.seed);
    const int step_choices[] = {1, 5, 10};

    for (int inst = 0; inst < opt.instances; ++inst) {
        const int n = 1 + inst % opt.max_qubits;
        const int dims[] = {1, 2, 4};
        const int d = std::min(dims[(inst / 2) % 3], opt.max_dim);
        const int steps = step_choices[(inst / 3) % 3];
        const LossKind kind = opt.losses[inst % opt.losses.size()];
        const int classes = (kind == LossKind::BinaryNegDistance) ? 2 : 2 + inst % 2;
        const bool data_driven = inst % 4 == 1;

        AnnealSpec spec = default_spec(n, 2, steps, 1.3);
        if (data_driven) spec.coeff_source = CoeffSource::FieldsDataDriven;
        const PauliBasis basis = PauliBasis::build(n);
        const EvolutionGrid grid = EvolutionGrid::from_spec(spec);

        Dataset batch;
        batch.dim = d;
        const int per_class = 2;
        for (int c = 0; c < classes; ++c) {
            for (int k = 0; k < per_class; ++k) {
                RealVector x(d);
                for (int i = 0; i < d; ++i) x(i) = 2.0 * rng.uniform() - 1.0;
                batch.samples.push_back({x, c});
            }
        }
        RealMatrix w(spec.coeff_len(), d);
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = 0.4 * rng.gaussian();

        const GradientReport adjoint =
            grad_loss_wrt_w(spec, basis, w, batch, grid, kind);
        const RealMatrix fd =
            fd_gradient_oracle(spec, basis, w, batch, grid, kind, opt.fd_step);

        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                const double g = adjoint.grad_w(i, j);
                const double f = fd(i, j);
                if (std::abs(g) > opt.grad_floor) {
                    report.max_rel_err =
                        std::max(report.max_rel_err, std::abs(g - f) / std::abs(g));
                } else {
                    report.max_abs_err = std::max(report.max_abs_err, std::abs(g - f));
                }
            }
        }
        ++report.instances_run;
    }
    report.passed =
        report.max_rel_err < opt.rel_tol && report.max_abs_err < opt.abs_tol;
    return report;
}

int cmd_grad_check(const GradCheckOptions& opt) {
    try {
        const GradCheckReport report = run_grad_check(opt);
        std::printf("instances %d\n", report.instances_run);
        std::printf("max relative error %.3e (tolerance %.3e)\n", report.max_rel_err,
                    opt.rel_tol);
        std::printf("max absolute error %.3e on small entries (tolerance %.3e)\n",
                    report.max_abs_err, opt.abs_tol);
        std::printf("%s\n", report.passed ? "PASS" : "FAIL");
        return report.passed ? 0 : 3;
    } catch (const std::exception& e) {
        return classify_exception(e);
    }
}

std::vector<SweepRow> run_scaling_sweep(const RunConfig& cfg) {
    const RunConfig::LoadedData data = cfg.load_data();
    const std::vector<int> qubit_list =
        cfg.qubit_list.empty() ? std::vector<int>{cfg.qubits} : cfg.qubit_list;

    std::vector<SweepRow> rows;
    for (int n : qubit_list) {
        SweepRow row;
        row.qubits = n;
        std::vector<double> train_accs, test_accs;
        for (std::uint64_t seed : cfg.seeds) {
            try {
                const RunOutcome outcome = run_single(cfg, n, seed, data);
                train_accs.push_back(outcome.train_accuracy);
                test_accs.push_back(outcome.test_accuracy);
            } catch (const std::exception& e) {
                std::cerr << "warning: qubits " << n << " seed " << seed
                          << " failed: " << e.what() << "\n";
            }
        }
        if (train_accs.empty()) continue;
        row.seeds_ok = static_cast<int>(train_accs.size());
        row.train_mean = mean(train_accs);
        row.train_std = stddev(train_accs);
        row.test_mean = mean(test_accs);
        row.test_std = stddev(test_accs);
        rows.push_back(row);
    }
    return rows;
}

int cmd_scaling_sweep(const RunConfig& cfg) {
    try {
        ensure_dir(cfg.out_dir);
        const std::vector<SweepRow> rows = run_scaling_sweep(cfg);
        std::ostringstream os;
        os << "qubits,seeds,train_mean,train_std,test_mean,test_std\n";
        for (const SweepRow& r : rows) {
            os << r.qubits << "," << r.seeds_ok << "," << format_double(r.train_mean)
               << "," << format_double(r.train_std) << "," << format_double(r.test_mean)
               << "," << format_double(r.test_std) << "\n";
        }
        write_text_file(os.str(), cfg.out_dir + "/sweep.csv");
        std::cout << os.str();
        return 0;
    } catch (const std::exception& e) {
        return classify_exception(e);
    }
}

}  // namespace aqec
