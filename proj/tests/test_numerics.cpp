#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>

#include "g2t/error.hpp"
#include "g2t/gradcheck.hpp"
#include "g2t/optim.hpp"
#include "g2t/parameters.hpp"
#include "g2t/random.hpp"
#include "g2t/tensor.hpp"

using namespace g2t;

namespace {

Tensor random_param(ParameterStore& store, const std::string& name, std::size_t r, std::size_t c, Rng& rng) {
    auto t = store.add(name, r, c, Init::zeros, rng);
    for (double& v : t.mutable_values()) v = rng.uniform(-1.0, 1.0);
    return t;
}

Tensor random_const(std::size_t r, std::size_t c, Rng& rng) {
    std::vector<double> v(r * c);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    return Tensor::from(r, c, v);
}

// Finite-difference check of a scalar function of the store's parameters.
void expect_gradients_match(const std::function<Tensor()>& f, ParameterStore& store, double tol = 1e-4) {
    const auto report = grad_check(f, store);
    INFO("worst parameter: " << report.worst_parameter << " error " << report.max_rel_error);
    CHECK(report.max_rel_error < tol);
}

}  // namespace

TEST_CASE("backward: sum(x*x)") {
    auto x = Tensor::row({1, 2, 3}, true);
    backward(sum(mul(x, x)));
    CHECK(x.grad() == std::vector<double>{2, 4, 6});
}

TEST_CASE("backward: inactive relu gives zero gradient") {
    auto w = Tensor::scalar(-0.5, true);
    backward(sum(relu(w)));
    CHECK(w.grad()[0] == 0.0);
}

TEST_CASE("backward: contract errors") {
    auto x = Tensor::row({1, 2}, true);
    CHECK_THROWS_AS(backward(mul(x, x)), ContractViolation);
    auto loss = sum(mul(x, x));
    backward(loss);
    CHECK_THROWS_AS(backward(loss), ContractViolation);
}

TEST_CASE("backward: gradient accumulation is additive") {
    Rng rng(1);
    auto w = Tensor::from(2, 3, {0.1, -0.2, 0.3, 0.4, -0.5, 0.6}, true);
    const auto a = random_const(1, 2, rng);
    const auto b = random_const(1, 2, rng);
    auto loss1 = [&] { return sum(tanh(matmul(a, w))); };
    auto loss2 = [&] { return sum(sigmoid(matmul(b, w))); };

    backward(add(loss1(), loss2()));
    const auto together = w.grad();
    w.zero_grad();
    backward(loss1());
    backward(loss2());
    const auto separate = w.grad();
    for (std::size_t i = 0; i < together.size(); ++i) CHECK(together[i] == doctest::Approx(separate[i]).epsilon(1e-14));
}

TEST_CASE("backward: random 2-layer composition matches central differences") {
    Rng rng(7);
    ParameterStore store;
    auto w1 = random_param(store, "w1", 4, 5, rng);
    auto b1 = random_param(store, "b1", 1, 5, rng);
    auto w2 = random_param(store, "w2", 5, 3, rng);
    const auto x = random_const(2, 4, rng);
    auto f = [&] { return sum(log_softmax_rows(matmul(tanh(add(matmul(x, w1), b1)), w2))); };
    expect_gradients_match(f, store);
}

TEST_CASE("no-grad mode records nothing") {
    auto x = Tensor::row({1, 2}, true);
    Tensor y;
    {
        NoGradGuard guard;
        CHECK_FALSE(grad_enabled());
        y = mul(x, x);
    }
    CHECK(grad_enabled());
    CHECK_FALSE(y.requires_grad());
}

TEST_CASE("property: every op passes a finite-difference check on random inputs") {
    Rng rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        ParameterStore store;
        auto a = random_param(store, "a", 3, 4, rng);
        auto b = random_param(store, "b", 3, 4, rng);
        auto row = random_param(store, "row", 1, 4, rng);
        auto col = random_param(store, "col", 3, 1, rng);
        auto s = random_param(store, "s", 1, 1, rng);
        auto m = random_param(store, "m", 4, 2, rng);
        // keep log() and relu away from their singular / non-smooth points
        auto pos = store.add("pos", 2, 2, Init::zeros, rng);
        for (double& v : pos.mutable_values()) v = rng.uniform(0.5, 2.0);
        for (double& v : a.mutable_values())
            if (std::abs(v) < 0.05) v = 0.3;

        const std::vector<std::size_t> gidx = {2, 0, 2, 1};
        const std::vector<std::size_t> sidx = {1, 1, 0};
        const std::vector<std::size_t> cidx = {3, 0, 3, 1};
        const std::vector<std::size_t> pidx = {0, 3, 2};
        const std::vector<bool> mask = {true, false, true, true};

        std::vector<std::pair<std::string, std::function<Tensor()>>> cases = {
            {"add", [&] { return sum(tanh(add(a, b))); }},
            {"add-row", [&] { return sum(tanh(add(a, row))); }},
            {"add-col", [&] { return sum(tanh(add(a, col))); }},
            {"sub-scalar", [&] { return sum(tanh(sub(a, s))); }},
            {"mul", [&] { return sum(mul(a, b)); }},
            {"mul-col", [&] { return sum(tanh(mul(a, col))); }},
            {"affine", [&] { return sum(tanh(affine(a, -2.0, 0.5))); }},
            {"matmul", [&] { return sum(tanh(matmul(a, m))); }},
            {"transpose", [&] { return sum(tanh(matmul(transpose(m), transpose(a)))); }},
            {"relu", [&] { return sum(mul(relu(a), b)); }},
            {"sigmoid", [&] { return sum(mul(sigmoid(a), b)); }},
            {"exp", [&] { return sum(exp(a)); }},
            {"log", [&] { return sum(log(pos)); }},
            {"log_clamped", [&] { return sum(log_clamped(pos, 1e-12)); }},
            {"concat_cols", [&] {
                 const Tensor parts[] = {a, col, b};
                 return sum(tanh(concat_cols(parts)));
             }},
            {"concat_rows", [&] {
                 const Tensor parts[] = {a, row};
                 return sum(tanh(concat_rows(parts)));
             }},
            {"slice", [&] { return sum(tanh(slice_rows(slice_cols(a, 1, 2), 1, 2))); }},
            {"gather", [&] { return sum(tanh(gather_rows(a, gidx))); }},
            {"scatter_rows", [&] { return sum(tanh(scatter_add_rows(a, sidx, 2))); }},
            {"scatter_cols", [&] { return sum(tanh(scatter_add_cols(a, cidx, 5))); }},
            {"softmax", [&] { return sum(mul(softmax_rows(a), b)); }},
            {"softmax-masked", [&] { return sum(mul(softmax_rows(a, mask), b)); }},
            {"log_softmax", [&] { return sum(pick(log_softmax_rows(a), pidx)); }},
        };
        for (const auto& [name, f] : cases) {
            INFO("op " << name);
            expect_gradients_match(f, store);
        }
    }
}

TEST_CASE("softmax rows are distributions; masked positions are exactly zero") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_const(3, 6, rng);
        const std::vector<bool> mask = {true, true, false, true, false, true};
        for (const auto& p : {softmax_rows(a), softmax_rows(a, mask)}) {
            for (std::size_t r = 0; r < 3; ++r) {
                double s = 0.0;
                for (std::size_t c = 0; c < 6; ++c) {
                    CHECK(p.at(r, c) >= 0.0);
                    s += p.at(r, c);
                }
                CHECK(std::abs(s - 1.0) < 1e-6);
            }
        }
        CHECK(softmax_rows(a, mask).at(0, 2) == 0.0);
    }
    const std::vector<bool> none(6, false);
    CHECK_THROWS_AS(softmax_rows(random_const(1, 6, rng), none), ContractViolation);
}

TEST_CASE("shape errors are contract violations") {
    const auto a = Tensor::zeros(2, 3);
    CHECK_THROWS_AS(matmul(a, a), ContractViolation);
    CHECK_THROWS_AS(add(a, Tensor::zeros(3, 2)), ContractViolation);
    CHECK_THROWS_AS(Tensor::from(2, 2, {1, 2, 3}), ContractViolation);
    CHECK_THROWS_AS(a.item(), ContractViolation);
}

TEST_CASE("indexing ops report the shape of their output") {
    const auto a = Tensor::from(3, 2, {1, 2, 3, 4, 5, 6});
    const std::vector<std::size_t> idx = {1, 0, 1};
    CHECK(pick(a, idx).shape() == std::vector<std::size_t>{3, 1});
    CHECK(pick(a, idx).values() == std::vector<double>{2, 3, 6});
    CHECK(gather_rows(a, idx).shape() == std::vector<std::size_t>{3, 2});
    CHECK(scatter_add_rows(a, idx, 4).shape() == std::vector<std::size_t>{4, 2});
    CHECK(scatter_add_cols(a, std::vector<std::size_t>{2, 2}, 3).shape() == std::vector<std::size_t>{3, 3});
}

// ---- grad_check -----------------------------------------------------------

TEST_CASE("grad_check: f(t) = t^2 at 3") {
    ParameterStore store;
    Rng rng(0);
    auto t = store.add("theta", 1, 1, Init::zeros, rng);
    t.mutable_values()[0] = 3.0;
    const auto report = grad_check([&] { return mul(t, t); }, store);
    REQUIRE(report.parameters.size() == 1);
    CHECK(report.parameters[0].compared == 1);
    CHECK(report.max_rel_error < 1e-9);
    CHECK(report.passed());
}

TEST_CASE("grad_check: relu at exactly zero is non-comparable") {
    ParameterStore store;
    Rng rng(0);
    auto t = store.add("theta", 1, 1, Init::zeros, rng);
    auto u = store.add("u", 1, 1, Init::zeros, rng);
    u.mutable_values()[0] = 2.0;
    const auto report = grad_check([&] { return add(relu(t), mul(u, u)); }, store);
    CHECK(report.parameters[0].non_comparable == 1);
    CHECK(report.parameters[0].compared == 0);
    CHECK(report.parameters[1].compared == 1);
    CHECK(report.passed());
}

TEST_CASE("grad_check: corrupted gradient fails and names the parameter") {
    Rng rng(3);
    ParameterStore store;
    auto w = random_param(store, "layer.W", 2, 2, rng);
    auto v = random_param(store, "layer.v", 1, 2, rng);
    const auto x = random_const(1, 2, rng);
    GradCheckOptions opts;
    opts.corrupt = [](std::string_view name, std::vector<double>& g) {
        if (name == "layer.v") g[1] += 0.1;
    };
    const auto report = grad_check([&] { return sum(mul(tanh(matmul(x, w)), v)); }, store, opts);
    CHECK_FALSE(report.passed());
    CHECK(report.worst_parameter == "layer.v");
}

TEST_CASE("grad_check: non-finite values raise NumericalError naming the parameter") {
    ParameterStore store;
    Rng rng(0);
    auto t = store.add("bad", 1, 1, Init::zeros, rng);
    t.mutable_values()[0] = 1e-6;  // log(t - 1e-5) is NaN for the minus probe
    try {
        grad_check([&] { return log(affine(t, 1.0, 0.0)); }, store);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("bad") != std::string::npos);
    }
}

// ---- Adam -----------------------------------------------------------------

TEST_CASE("adam: first step is -lr * sign(g)") {
    ParameterStore store;
    Rng rng(0);
    auto t = store.add("t", 1, 3, Init::zeros, rng);
    t.mutable_grad() = {2.5, -0.7, 100.0};
    AdamState state;
    adam_step(state, store);
    CHECK(state.step == 1);
    CHECK(t.values()[0] == doctest::Approx(-0.001).epsilon(1e-6));
    CHECK(t.values()[1] == doctest::Approx(0.001).epsilon(1e-6));
    CHECK(t.values()[2] == doctest::Approx(-0.001).epsilon(1e-6));
    CHECK(t.grad() == std::vector<double>{0, 0, 0});
}

TEST_CASE("adam: zero gradient leaves parameters but advances t") {
    ParameterStore store;
    Rng rng(0);
    auto t = store.add("t", 1, 2, Init::zeros, rng);
    t.mutable_values() = {0.5, -0.25};
    AdamState state;
    adam_step(state, store);
    adam_step(state, store);
    CHECK(state.step == 2);
    CHECK(t.values() == std::vector<double>{0.5, -0.25});
}

TEST_CASE("adam: two steps on theta^2 from 1 decrease theta") {
    ParameterStore store;
    Rng rng(0);
    auto t = store.add("t", 1, 1, Init::zeros, rng);
    t.mutable_values()[0] = 1.0;
    AdamState state;
    // scalar simulation oracle
    double theta = 1.0, m = 0.0, v = 0.0;
    for (int step = 1; step <= 2; ++step) {
        const double before = t.values()[0];
        backward(mul(t, t));
        adam_step(state, store);
        const double g = 2.0 * theta;
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        theta -= 0.001 * (m / (1 - std::pow(0.9, step))) / (std::sqrt(v / (1 - std::pow(0.999, step))) + 1e-8);
        CHECK(t.values()[0] < before);
        CHECK(t.values()[0] == doctest::Approx(theta).epsilon(1e-14));
    }
}

TEST_CASE("adam: moment shape mismatch") {
    ParameterStore store;
    Rng rng(0);
    store.add("t", 1, 2, Init::zeros, rng);
    AdamState state;
    state.first_moment["t"] = {0.0};
    CHECK_THROWS_AS(adam_step(state, store), ContractViolation);
}

TEST_CASE("clip_grad_norm") {
    ParameterStore store;
    Rng rng(0);
    auto t = store.add("t", 1, 2, Init::zeros, rng);
    t.mutable_grad() = {3.0, 4.0};
    CHECK(clip_grad_norm(store, 5.0) == doctest::Approx(5.0));
    CHECK(t.grad()[0] == doctest::Approx(3.0));
    CHECK(clip_grad_norm(store, 1.0) == doctest::Approx(5.0));
    CHECK(global_grad_norm(store) == doctest::Approx(1.0));
}

// ---- dropout --------------------------------------------------------------

TEST_CASE("dropout") {
    Rng rng(123);
    const auto x = Tensor::row({1.0, -2.0, 3.0});
    CHECK(dropout(x, 0.3, false, rng).values() == x.values());
    CHECK(dropout(x, 0.0, true, rng).values() == x.values());
    CHECK_THROWS_AS(dropout(x, 1.0, true, rng), ContractViolation);
    CHECK_THROWS_AS(dropout(x, -0.1, true, rng), ContractViolation);

    const std::size_t n = 1000000;
    const auto ones = Tensor::from(1, n, std::vector<double>(n, 1.0));
    const auto y = dropout(ones, 0.3, true, rng);
    double mean = 0.0;
    std::size_t zeros = 0;
    for (double v : y.values()) {
        mean += v;
        zeros += v == 0.0;
    }
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean - 1.0) < 0.01);
    CHECK(std::abs(static_cast<double>(zeros) / n - 0.3) < 0.01 * 0.3 + 1e-9);

    Rng r1(5), r2(5);
    CHECK(dropout(ones, 0.3, true, r1).values() == dropout(ones, 0.3, true, r2).values());
}

// ---- parameters / checkpoints --------------------------------------------

TEST_CASE("initialisation policy") {
    ParameterStore store;
    Rng rng(1);
    auto w = store.add("w", 30, 20, Init::glorot, rng);
    auto b = store.add("b", 1, 20, Init::zeros, rng);
    const double a = std::sqrt(6.0 / 50.0);
    for (double v : w.values()) CHECK(std::abs(v) <= a);
    for (double v : b.values()) CHECK(v == 0.0);
    CHECK(store.scalar_count() == 620);
    CHECK_THROWS_AS(store.add("w", 1, 1, Init::zeros, rng), ContractViolation);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
    Rng rng(77);
    ParameterStore store;
    random_param(store, "enc.W", 3, 4, rng);
    auto b = random_param(store, "enc.b", 1, 4, rng);
    b.mutable_values()[2] = 1.0 / 3.0;
    b.mutable_values()[3] = std::nextafter(1.0, 2.0);
    const auto path = std::filesystem::temp_directory_path() / "g2t_test_ckpt.bin";
    save_checkpoint(path, store, {{"epoch", 3}});

    ParameterStore other;
    Rng rng2(1);
    other.add("enc.W", 3, 4, Init::zeros, rng2);
    other.add("enc.b", 1, 4, Init::zeros, rng2);
    const auto meta = load_checkpoint(path, other);
    CHECK(meta.at("epoch") == 3);
    CHECK(read_checkpoint_metadata(path).at("epoch") == 3);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& x = store.parameters()[i].tensor.values();
        const auto& y = other.parameters()[i].tensor.values();
        REQUIRE(x.size() == y.size());
        CHECK(std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
    }

    ParameterStore wrong;
    wrong.add("enc.W", 4, 3, Init::zeros, rng2);
    wrong.add("enc.b", 1, 4, Init::zeros, rng2);
    CHECK_THROWS_AS(load_checkpoint(path, wrong), DataError);
    std::filesystem::remove(path);
}

TEST_CASE("rng streams are reproducible and distinct") {
    Rng base(10);
    auto a = base.stream("dropout");
    auto b = base.stream("dropout");
    auto c = base.stream("shuffle");
    CHECK(a.next() == b.next());
    CHECK(a.next() != c.next());
    Rng r(4);
    for (int i = 0; i < 1000; ++i) CHECK(r.index(7) < 7);
}
