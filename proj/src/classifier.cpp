#include "aqec/classifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace aqec {

std::string to_string(LossKind k) {
    switch (k) {
        case LossKind::BinaryNegDistance: return "binary_neg_distance";
        case LossKind::NegProduct: return "neg_product";
        case LossKind::NegSum: return "neg_sum";
        case LossKind::NegMinOverSpread: return "neg_min_over_spread";
    }
    return "neg_product";
}

LossKind loss_kind_from_string(const std::string& s) {
    if (s == "binary_neg_distance") return LossKind::BinaryNegDistance;
    if (s == "neg_product") return LossKind::NegProduct;
    if (s == "neg_sum") return LossKind::NegSum;
    if (s == "neg_min_over_spread") return LossKind::NegMinOverSpread;
    throw std::invalid_argument("unknown loss kind: " + s);
}

ClassCentroid centroid(const std::vector<QuantumState>& states, int label) {
    if (states.empty()) throw std::invalid_argument("centroid of empty class");
    const Eigen::Index dim = states.front().size();
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for (const QuantumState& psi : states) m.noalias() += psi * psi.adjoint();
    m /= static_cast<double>(states.size());
    return {label, std::move(m), static_cast<int>(states.size())};
}

std::vector<ClassCentroid> class_centroids(const std::vector<QuantumState>& states,
                                           const std::vector<int>& labels) {
    if (states.size() != labels.size()) {
        throw std::invalid_argument("states/labels size mismatch");
    }
    std::map<int, std::vector<QuantumState>> by_label;
    for (std::size_t k = 0; k < states.size(); ++k) {
        by_label[labels[k]].push_back(states[k]);
    }
    std::vector<ClassCentroid> out;
    out.reserve(by_label.size());
    for (const auto& [label, members] : by_label) {
        out.push_back(centroid(members, label));
    }
    return out;
}

RealMatrix distance_matrix(const std::vector<ClassCentroid>& centroids) {
    const std::size_t c = centroids.size();
    if (c < 2) throw std::invalid_argument("need >= 2 centroids");
    RealMatrix d = RealMatrix::Zero(c, c);
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = i + 1; j < c; ++j) {
            d(i, j) = d(j, i) = hs_distance(centroids[i].matrix, centroids[j].matrix);
        }
    }
    return d;
}

namespace {

struct SpreadInfo {
    double r_max = 0.0;
    std::size_t arg_class = 0;   // index into the centroid list
    std::size_t arg_sample = 0;  // index within that class's state list
};

SpreadInfo max_spread(const std::vector<ClassCentroid>& centroids,
                      const std::vector<std::vector<QuantumState>>& per_class_states) {
    if (per_class_states.size() != centroids.size()) {
        throw std::invalid_argument("per-class states required for spread loss");
    }
    SpreadInfo info;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        if (per_class_states[c].empty()) {
            throw std::invalid_argument("spread loss needs >= 1 sample per class");
        }
        for (std::size_t k = 0; k < per_class_states[c].size(); ++k) {
            const QuantumState& psi = per_class_states[c][k];
            const ComplexMatrix rho = psi * psi.adjoint();
            const double r = hs_distance(rho, centroids[c].matrix);
            if (r > info.r_max) {
                info.r_max = r;
                info.arg_class = c;
                info.arg_sample = k;
            }
        }
    }
    return info;
}

struct MinDistance {
    double d_min = 0.0;
    std::size_t i = 0, j = 0;
};

MinDistance min_pair(const RealMatrix& d) {
    MinDistance out;
    bool first = true;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
            if (first || d(i, j) < out.d_min) {
                out = {d(i, j), static_cast<std::size_t>(i),
                       static_cast<std::size_t>(j)};
                first = false;
            }
        }
    }
    return out;
}

}  // namespace

double loss_value(const std::vector<ClassCentroid>& centroids,
                  const std::vector<std::vector<QuantumState>>& per_class_states,
                  LossKind kind) {
    if (centroids.size() < 2) throw std::invalid_argument("need >= 2 classes");
    const RealMatrix d = distance_matrix(centroids);
    switch (kind) {
        case LossKind::BinaryNegDistance:
            if (centroids.size() != 2) {
                throw std::invalid_argument("binary loss needs exactly 2 classes");
            }
            return -d(0, 1);
        case LossKind::NegProduct: {
            double p = 1.0;
            for (Eigen::Index i = 0; i < d.rows(); ++i)
                for (Eigen::Index j = i + 1; j < d.cols(); ++j) p *= d(i, j);
            return -p;
        }
        case LossKind::NegSum: {
            double s = 0.0;
            for (Eigen::Index i = 0; i < d.rows(); ++i)
                for (Eigen::Index j = i + 1; j < d.cols(); ++j) s += d(i, j);
            return -s;
        }
        case LossKind::NegMinOverSpread: {
            const SpreadInfo spread = max_spread(centroids, per_class_states);
            if (spread.r_max <= 0.0) {
                throw std::runtime_error(
                    "degenerate embedding: every sample coincides with its "
                    "centroid (r_max = 0)");
            }
            return -min_pair(d).d_min / spread.r_max;
        }
    }
    throw std::invalid_argument("unknown loss kind");
}

LossCotangents loss_with_cotangents(const std::vector<QuantumState>& final_states,
                                    const std::vector<int>& labels, LossKind kind) {
    LossCotangents out;
    out.centroids = class_centroids(final_states, labels);
    const std::vector<ClassCentroid>& cents = out.centroids;
    const std::size_t n_classes = cents.size();
    if (n_classes < 2) throw std::invalid_argument("need >= 2 classes in batch");
    const RealMatrix d = distance_matrix(cents);

    // Per-class cotangent dL/dM_c, plus direct per-sample terms for the
    // ratio loss.
    const Eigen::Index dim = final_states.front().size();
    std::vector<ComplexMatrix> d_m(n_classes, ComplexMatrix::Zero(dim, dim));
    std::vector<ComplexMatrix> direct(final_states.size());

    std::map<int, std::size_t> class_index;
    for (std::size_t c = 0; c < n_classes; ++c) class_index[cents[c].label] = c;

    auto add_pair = [&](std::size_t i, std::size_t j, double dl_dd) {
        const ComplexMatrix diff = 2.0 * (cents[i].matrix - cents[j].matrix);
        d_m[i] += dl_dd * diff;
        d_m[j] -= dl_dd * diff;
    };

    switch (kind) {
        case LossKind::BinaryNegDistance:
            if (n_classes != 2) {
                throw std::invalid_argument("binary loss needs exactly 2 classes");
            }
            out.loss = -d(0, 1);
            add_pair(0, 1, -1.0);
            break;
        case LossKind::NegProduct: {
            double p = 1.0;
            for (Eigen::Index i = 0; i < d.rows(); ++i)
                for (Eigen::Index j = i + 1; j < d.cols(); ++j) p *= d(i, j);
            out.loss = -p;
            for (std::size_t i = 0; i < n_classes; ++i) {
                for (std::size_t j = i + 1; j < n_classes; ++j) {
                    double rest = 1.0;
                    for (std::size_t a = 0; a < n_classes; ++a)
                        for (std::size_t b = a + 1; b < n_classes; ++b)
                            if (!(a == i && b == j)) rest *= d(a, b);
                    add_pair(i, j, -rest);
                }
            }
            break;
        }
        case LossKind::NegSum: {
            double s = 0.0;
            for (Eigen::Index i = 0; i < d.rows(); ++i)
                for (Eigen::Index j = i + 1; j < d.cols(); ++j) s += d(i, j);
            out.loss = -s;
            for (std::size_t i = 0; i < n_classes; ++i)
                for (std::size_t j = i + 1; j < n_classes; ++j) add_pair(i, j, -1.0);
            break;
        }
        case LossKind::NegMinOverSpread: {
            std::vector<std::vector<QuantumState>> per_class(n_classes);
            std::vector<std::vector<std::size_t>> member_index(n_classes);
            for (std::size_t k = 0; k < final_states.size(); ++k) {
                const std::size_t c = class_index.at(labels[k]);
                per_class[c].push_back(final_states[k]);
                member_index[c].push_back(k);
            }
            const SpreadInfo spread = max_spread(cents, per_class);
            if (spread.r_max <= 0.0) {
                throw std::runtime_error(
                    "degenerate embedding: every sample coincides with its "
                    "centroid (r_max = 0)");
            }
            const MinDistance mp = min_pair(d);
            out.loss = -mp.d_min / spread.r_max;

            add_pair(mp.i, mp.j, -1.0 / spread.r_max);

            const std::size_t k_star = member_index[spread.arg_class][spread.arg_sample];
            const QuantumState& psi = final_states[k_star];
            const ComplexMatrix rho = psi * psi.adjoint();
            const ComplexMatrix diff =
                2.0 * (rho - cents[spread.arg_class].matrix);
            const double dl_dr = mp.d_min / (spread.r_max * spread.r_max);
            direct[k_star] = dl_dr * diff;
            d_m[spread.arg_class] -= dl_dr * diff;
            break;
        }
    }

    out.d_rho.resize(final_states.size());
    std::map<int, int> class_count;
    for (int lab : labels) ++class_count[lab];
    for (std::size_t k = 0; k < final_states.size(); ++k) {
        const std::size_t c = class_index.at(labels[k]);
        ComplexMatrix g = d_m[c] / static_cast<double>(class_count.at(labels[k]));
        if (direct[k].size() > 0) g += direct[k];
        out.d_rho[k] = std::move(g);
    }
    return out;
}

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
        !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        throw std::invalid_argument("adam betas must lie in [0,1)");
    }
    if (!(adam_eps > 0.0)) throw std::invalid_argument("adam_eps must be > 0");
    if (!(w_init_scale > 0.0)) throw std::invalid_argument("w_init_scale must be > 0");
}

void adam_step(TrainState& state, const RealMatrix& grad, const TrainConfig& config) {
    if (grad.rows() != state.w.rows() || grad.cols() != state.w.cols()) {
        throw std::invalid_argument("gradient shape mismatch");
    }
    if (!grad.allFinite()) {
        throw std::runtime_error("non-finite gradient entries, update aborted");
    }
    const double b1 = config.adam_beta1, b2 = config.adam_beta2;
    state.adam_m = b1 * state.adam_m + (1.0 - b1) * grad;
    state.adam_v = b2 * state.adam_v + (1.0 - b2) * grad.cwiseAbs2();
    ++state.step;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    const RealMatrix m_hat = state.adam_m / corr1;
    const RealMatrix v_hat = state.adam_v / corr2;
    state.w.array() -= config.learning_rate * m_hat.array() /
                       (v_hat.array().sqrt() + config.adam_eps);
}

namespace {

double accuracy_from_states(const std::vector<QuantumState>& states,
                            const std::vector<int>& labels,
                            const std::vector<ClassCentroid>& centroids) {
    std::size_t correct = 0;
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (predict_state(states[k], centroids) == labels[k]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(states.size());
}

}  // namespace

TrainResult train(const Dataset& dataset, const AnnealSpec& spec,
                  const EvolutionGrid& grid, const TrainConfig& config) {
    config.validate();
    if (dataset.empty()) throw std::invalid_argument("empty training set");
    if (dataset.labels_present().size() < 2) {
        throw std::invalid_argument("training needs >= 2 labels");
    }
    const PauliBasis basis = PauliBasis::build(spec.qubits);

    TrainResult result;
    TrainState& state = result.state;
    const int rows = spec.coeff_len();
    const int cols = dataset.dim;
    state.w = RealMatrix(rows, cols);
    Rng rng(config.rng_seed);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            state.w(i, j) = config.w_init_scale * rng.gaussian();
        }
    }
    state.adam_m = RealMatrix::Zero(rows, cols);
    state.adam_v = RealMatrix::Zero(rows, cols);

    using Clock = std::chrono::steady_clock;
    BatchForward fwd = forward_batch(spec, basis, state.w, dataset, grid);
    {
        const LossCotangents cot =
            loss_with_cotangents(fwd.final_states(), fwd.labels, config.loss_kind);
        state.initial_loss = cot.loss;
    }

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto t0 = Clock::now();
        const GradientReport grad = grad_from_forward(spec, basis, state.w, dataset,
                                                      fwd, grid, config.loss_kind);
        adam_step(state, grad.grad_w, config);

        // Metrics at the post-update w; the final row therefore matches the
        // checkpointed model exactly. This forward pass is reused as the
        // next epoch's gradient input.
        fwd = forward_batch(spec, basis, state.w, dataset, grid);
        const std::vector<QuantumState> finals = fwd.final_states();
        const LossCotangents cot =
            loss_with_cotangents(finals, fwd.labels, config.loss_kind);
        result.centroids = cot.centroids;
        const double acc = accuracy_from_states(finals, fwd.labels, result.centroids);
        if (!std::isfinite(cot.loss)) {
            throw std::runtime_error("non-finite loss at epoch " +
                                     std::to_string(epoch));
        }
        state.loss_history.push_back(cot.loss);
        state.accuracy_history.push_back(acc);
        const double wall_ms =
            std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        result.history.push_back({epoch, cot.loss, acc, wall_ms});
    }
    return result;
}

int predict_state(const QuantumState& psi, const std::vector<ClassCentroid>& centroids) {
    if (centroids.empty()) throw std::invalid_argument("no centroids");
    const ComplexMatrix rho = psi * psi.adjoint();
    int best_label = centroids.front().label;
    double best_dist = hs_distance(rho, centroids.front().matrix);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double dist = hs_distance(rho, centroids[c].matrix);
        if (dist < best_dist ||
            (dist == best_dist && centroids[c].label < best_label)) {
            best_dist = dist;
            best_label = centroids[c].label;
        }
    }
    return best_label;
}

int predict(const RealVector& x, const RealMatrix& w,
            const std::vector<ClassCentroid>& centroids, const AnnealSpec& spec,
            const PauliBasis& basis, const EvolutionGrid& grid) {
    return predict_state(embed_state(spec, basis, w, x, grid), centroids);
}

double evaluate(const Dataset& dataset, const RealMatrix& w,
                const std::vector<ClassCentroid>& centroids, const AnnealSpec& spec,
                const PauliBasis& basis, const EvolutionGrid& grid) {
    if (dataset.empty()) throw std::invalid_argument("empty dataset");
    std::size_t correct = 0;
    for (const Sample& smp : dataset.samples) {
        if (predict(smp.features, w, centroids, spec, basis, grid) == smp.label) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

RealMatrix overlap_matrix(const std::vector<QuantumState>& states) {
    if (states.empty()) throw std::invalid_argument("no states");
    const std::size_t n = states.size();
    RealMatrix m(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
            const double ov = std::norm(states[a].dot(states[b]));
            m(a, b) = m(b, a) = ov;
        }
    }
    return m;
}

std::vector<std::size_t> label_grouped_order(const std::vector<int>& labels) {
    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
    return order;
}

BaselineResult raw_linear_baseline(const Dataset& train_set, const Dataset& test_set) {
    if (train_set.empty() || test_set.empty()) {
        throw std::invalid_argument("baseline needs nonempty train and test sets");
    }
    std::map<int, RealVector> means;
    std::map<int, int> counts;
    for (const Sample& smp : train_set.samples) {
        auto [it, inserted] = means.try_emplace(smp.label,
                                                RealVector::Zero(train_set.dim));
        it->second += smp.features;
        ++counts[smp.label];
    }
    for (auto& [label, mean] : means) mean /= static_cast<double>(counts[label]);

    auto nearest = [&](const RealVector& x) {
        int best = means.begin()->first;
        double best_d = (x - means.begin()->second).squaredNorm();
        for (const auto& [label, mean] : means) {
            const double d = (x - mean).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = label;
            }
        }
        return best;
    };
    auto score = [&](const Dataset& ds) {
        std::size_t correct = 0;
        for (const Sample& smp : ds.samples) {
            if (nearest(smp.features) == smp.label) ++correct;
        }
        return static_cast<double>(correct) / static_cast<double>(ds.size());
    };
    return {score(train_set), score(test_set)};
}

}  // namespace aqec
