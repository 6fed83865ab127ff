#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "aqec/app.hpp"
#include "aqec/io.hpp"

using namespace aqec;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "aqec_io_test";
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const std::string& body, const std::string& name) {
    const fs::path p = temp_dir() / name;
    std::ofstream(p) << body;
    return p.string();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("config parsing with defaults and comments") {
    const std::string path = write_config(
        "# experiment\n"
        "anneal.qubits = 4\n"
        "anneal.t_max = 0.91\n"
        "train.loss = neg_sum   # trailing comment\n"
        "train.epochs = 25\n"
        "data.source = circles\n"
        "data.classes = 3\n"
        "experiment.seeds = 1, 2, 3\n",
        "ok.cfg");
    const RunConfig cfg = RunConfig::load(path);
    CHECK(cfg.qubits == 4);
    CHECK(cfg.t_max == 0.91);
    CHECK(cfg.sine_terms == 3);  // default
    CHECK(cfg.steps == 10);      // default
    CHECK(cfg.train.loss_kind == LossKind::NegSum);
    CHECK(cfg.train.epochs == 25);
    CHECK(cfg.data.classes == 3);
    CHECK(cfg.data.effective_radii() == std::vector<double>{1.0, 0.65, 0.3});
    REQUIRE(cfg.seeds.size() == 3);
    CHECK(cfg.seeds[2] == 3);

    const AnnealSpec spec = cfg.make_spec();
    CHECK(spec.qubits == 4);
    CHECK(spec.fixed_hx(0) == -1.0);
    CHECK(spec.fixed_hz(2) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(cfg.make_spec(2).qubits == 2);
}

TEST_CASE("config rejects unknown and duplicate keys") {
    const std::string unknown = write_config("anneal.qubitz = 3\n", "unknown.cfg");
    CHECK_THROWS_WITH_AS(RunConfig::load(unknown), doctest::Contains("qubitz"),
                         std::invalid_argument);

    const std::string dup =
        write_config("anneal.qubits = 3\nanneal.qubits = 4\n", "dup.cfg");
    CHECK_THROWS_AS(RunConfig::load(dup), std::invalid_argument);

    const std::string noeq = write_config("anneal.qubits 3\n", "noeq.cfg");
    CHECK_THROWS_AS(RunConfig::load(noeq), std::invalid_argument);

    const std::string badval =
        write_config("train.loss = nonsense\n", "badval.cfg");
    CHECK_THROWS_AS(RunConfig::load(badval), std::invalid_argument);
}

TEST_CASE("load_data generates circles with distinct train/test draws") {
    const std::string path = write_config(
        "data.source = circles\n"
        "data.train_points = 40\n"
        "data.test_points = 20\n"
        "data.seed = 5\n",
        "circles.cfg");
    const RunConfig cfg = RunConfig::load(path);
    const RunConfig::LoadedData data = cfg.load_data();
    CHECK(data.train.size() == 40);
    CHECK(data.test.size() == 20);
    CHECK((data.train.samples[0].features - data.test.samples[0].features).norm() !=
          0.0);
}

TEST_CASE("checkpoint round trip is exact and byte-stable") {
    Checkpoint ck;
    ck.spec = default_spec(2, 3, 10, 2.0);
    ck.data_dim = 2;
    ck.norm.mode = NormalizationMode::Standardize;
    ck.norm.scale = 16.0;
    ck.norm.mean = RealVector::LinSpaced(2, -0.3, 1.7);
    ck.norm.stddev = RealVector::Constant(2, 0.123456789012345678);
    ck.train_seed = 42;
    ck.epochs_completed = 17;
    ck.final_loss = -1.9999999999999998;
    Rng rng(2);
    ck.w = RealMatrix(ck.spec.coeff_len(), 2);
    for (Eigen::Index i = 0; i < ck.w.rows(); ++i)
        for (Eigen::Index j = 0; j < 2; ++j) ck.w(i, j) = rng.gaussian();
    QuantumState psi(4);
    psi << Complex(0.5, 0.1), Complex(0.5, -0.1), Complex(0.5, 0.0),
        Complex(-0.48989794855663565, 0.0);
    psi.normalize();
    ck.centroids = {centroid({psi}, 0), centroid({QuantumState::Unit(4, 2)}, 1)};

    const fs::path p1 = temp_dir() / "ck1.txt";
    const fs::path p2 = temp_dir() / "ck2.txt";
    ck.save(p1.string());
    const Checkpoint back = Checkpoint::load(p1.string());
    back.save(p2.string());
    CHECK(slurp(p1) == slurp(p2));

    CHECK(back.spec.qubits == 2);
    CHECK(back.spec.t_max == 2.0);
    CHECK((back.w - ck.w).norm() == 0.0);
    CHECK((back.norm.mean - ck.norm.mean).norm() == 0.0);
    CHECK(back.final_loss == ck.final_loss);
    REQUIRE(back.centroids.size() == 2);
    CHECK(back.centroids[0].label == 0);
    CHECK((back.centroids[0].matrix - ck.centroids[0].matrix).norm() == 0.0);

    const fs::path bad = temp_dir() / "bad.txt";
    std::ofstream(bad) << "not-a-checkpoint 1\n";
    CHECK_THROWS_AS(Checkpoint::load(bad.string()), std::runtime_error);
}

TEST_CASE("metrics csv format") {
    const fs::path p = temp_dir() / "metrics.csv";
    write_metrics_csv({{1, -0.5, 0.75, 12.0}, {2, -0.625, 1.0, 11.0}}, p.string());
    const std::string text = slurp(p);
    CHECK(text.rfind("epoch,loss,train_accuracy,wall_ms\n", 0) == 0);
    CHECK(text.find("\n1,-0.5,0.75,") != std::string::npos);
    CHECK(text.find("\n2,-0.625,1,") != std::string::npos);
}

TEST_CASE("pgm export is a valid clamped P5 image") {
    RealMatrix m(2, 3);
    m << 0.0, 0.5, 1.0, -2.0, 3.0, 0.25;
    const fs::path p = temp_dir() / "img.pgm";
    write_matrix_pgm(m, p.string());
    const std::string raw = slurp(p);
    const std::string header = "P5\n3 2\n255\n";
    REQUIRE(raw.size() == header.size() + 6);
    CHECK(raw.rfind(header, 0) == 0);
    const auto* px = reinterpret_cast<const unsigned char*>(raw.data() + header.size());
    CHECK(px[0] == 0);
    CHECK(px[1] == 128);
    CHECK(px[2] == 255);
    CHECK(px[3] == 0);    // clamped below
    CHECK(px[4] == 255);  // clamped above
    CHECK(px[5] == 64);
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456789.123456789, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("grad-check command is self-contained and passes") {
    GradCheckOptions opt;
    opt.instances = 6;  // keep the unit test quick; acceptance runs 20
    const GradCheckReport rep = run_grad_check(opt);
    CHECK(rep.instances_run == 6);
    CHECK(rep.passed);
    CHECK(rep.max_rel_err < opt.rel_tol);

    GradCheckOptions strict = opt;
    strict.instances = 2;
    strict.rel_tol = 0.0;
    strict.abs_tol = 0.0;
    CHECK_FALSE(run_grad_check(strict).passed);
    CHECK(cmd_grad_check(strict) == 3);
}

TEST_CASE("end-to-end train/eval/predict through the command layer") {
    const fs::path out = temp_dir() / "run";
    fs::remove_all(out);
    const std::string cfg_path = write_config(
        "anneal.qubits = 2\n"
        "anneal.steps = 6\n"
        "train.epochs = 15\n"
        "train.loss = binary_neg_distance\n"
        "data.source = circles\n"
        "data.train_points = 24\n"
        "data.test_points = 12\n"
        "data.noise_std = 0.02\n"
        "experiment.seeds = 1\n"
        "output.dir = " + out.string() + "\n",
        "e2e.cfg");
    const RunConfig cfg = RunConfig::load(cfg_path);
    REQUIRE(cmd_train(cfg) == 0);
    CHECK(fs::exists(out / "seed_1" / "metrics.csv"));
    CHECK(fs::exists(out / "seed_1" / "checkpoint.txt"));
    CHECK(fs::exists(out / "summary.csv"));

    // eval against a freshly written dataset csv
    const fs::path eval_csv = temp_dir() / "eval.csv";
    write_csv(gen_circles(2, 12, {1.0, 0.5}, 0.02, 8), eval_csv.string());
    const fs::path report = temp_dir() / "report.txt";
    CHECK(cmd_eval((out / "seed_1" / "checkpoint.txt").string(), eval_csv.string(),
                   report.string()) == 0);
    CHECK(slurp(report).find("accuracy") != std::string::npos);

    // predict on unlabeled rows
    const fs::path pred_in = temp_dir() / "pred_in.csv";
    std::ofstream(pred_in) << "1.0,0.0\n0.0,0.5\n";
    const fs::path pred_out = temp_dir() / "pred_out.csv";
    CHECK(cmd_predict((out / "seed_1" / "checkpoint.txt").string(),
                      pred_in.string(), pred_out.string()) == 0);
    const std::string preds = slurp(pred_out);
    CHECK(std::count(preds.begin(), preds.end(), '\n') == 2);

    // dimension mismatch is a validation error naming both dims
    const fs::path wrong = temp_dir() / "wrong.csv";
    std::ofstream(wrong) << "1.0,2.0,3.0,0\n";
    CHECK(cmd_eval((out / "seed_1" / "checkpoint.txt").string(), wrong.string()) ==
          1);
}
