#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "comemnet/autodiff.hpp"
#include "comemnet/errors.hpp"
#include "comemnet/grad_check.hpp"
#include "comemnet/matrix.hpp"
#include "comemnet/optimizer.hpp"
#include "comemnet/rng.hpp"

using namespace comemnet;

namespace {

// Oracle: plain i-j-k matmul, independent of the library's loop order.
Matrix matmul_oracle(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < b.cols; ++j) {
            double s = 0.0;
            for (int k = 0; k < a.cols; ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    return out;
}

Matrix random_matrix(int r, int c, Rng& rng, double scale = 1.0) {
    Matrix m(r, c);
    for (double& v : m.data) v = rng.normal(0.0, scale);
    return m;
}

} // namespace

TEST_CASE("rng is deterministic and seed derivation separates streams") {
    Rng a(42), b(42), c(43);
    bool same = true, diff = false;
    for (int i = 0; i < 64; ++i) {
        auto x = a.next_u64();
        if (x != b.next_u64()) same = false;
        if (x != c.next_u64()) diff = true;
    }
    CHECK(same);
    CHECK(diff);
    CHECK(derive_seed(1, "alpha") != derive_seed(1, "beta"));
    CHECK(derive_seed(1, "alpha", 0) != derive_seed(1, "alpha", 1));
    CHECK(derive_seed(1, "alpha", 2, 3) == derive_seed(1, "alpha", 2, 3));

    Rng u(7);
    for (int i = 0; i < 1000; ++i) {
        double v = u.uniform01();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("matmul matches the naive oracle and validates shapes") {
    Rng rng(11);
    Matrix a = random_matrix(3, 4, rng);
    Matrix b = random_matrix(4, 2, rng);
    Matrix got = matmul(a, b);
    Matrix want = matmul_oracle(a, b);
    CHECK(max_abs_diff(got, want) < 1e-12);

    Matrix bad(3, 3);
    CHECK_THROWS_AS(matmul(a, bad), ConfigError);

    // purity: inputs untouched
    Matrix a2 = a;
    (void)matmul(a, b);
    CHECK(max_abs_diff(a, a2) == 0.0);
}

TEST_CASE("linear op identity and zero-input cases") {
    Tape t;
    Param w(2, 2);
    w.value(0, 0) = 1.0;
    w.value(1, 1) = 1.0;
    Param b(1, 2);
    Matrix x(1, 2);
    x(0, 0) = 1.0;
    x(0, 1) = 2.0;
    Val y = t.linear(t.constant(x), t.leaf(w), t.leaf(b));
    CHECK(t.value(y)(0, 0) == doctest::Approx(1.0));
    CHECK(t.value(y)(0, 1) == doctest::Approx(2.0));

    Tape t2;
    Param w2(2, 2);
    Rng rng(3);
    for (double& v : w2.value.data) v = rng.normal(0.0, 1.0);
    Param b2(1, 2);
    b2.value(0, 0) = 3.0;
    b2.value(0, 1) = 4.0;
    Matrix zero(1, 2);
    Val y2 = t2.linear(t2.constant(zero), t2.leaf(w2), t2.leaf(b2));
    CHECK(t2.value(y2)(0, 0) == doctest::Approx(3.0));
    CHECK(t2.value(y2)(0, 1) == doctest::Approx(4.0));
}

TEST_CASE("linear op random case matches matmul oracle") {
    Rng rng(17);
    Matrix x = random_matrix(3, 4, rng);
    Param w(4, 2);
    for (double& v : w.value.data) v = rng.normal(0.0, 1.0);
    Param b(1, 2);
    for (double& v : b.value.data) v = rng.normal(0.0, 1.0);

    Tape t;
    Val y = t.linear(t.constant(x), t.leaf(w), t.leaf(b));

    Matrix want = matmul_oracle(x, w.value);
    for (int i = 0; i < want.rows; ++i)
        for (int j = 0; j < want.cols; ++j) want(i, j) += b.value(0, j);
    CHECK(max_abs_diff(t.value(y), want) < 1e-12);
}

TEST_CASE("activation fixed points") {
    Tape t;
    Matrix x(1, 4);
    x(0, 0) = 0.0;
    x(0, 1) = -2.5;
    x(0, 2) = 2.5;
    x(0, 3) = 0.0;
    Val c = t.constant(x);
    CHECK(t.value(t.sigmoid(c))(0, 0) == doctest::Approx(0.5));
    CHECK(t.value(t.tanh_(c))(0, 0) == doctest::Approx(0.0));
    Val r = t.relu(c);
    CHECK(t.value(r)(0, 1) == 0.0);
    CHECK(t.value(r)(0, 2) == 2.5);
}

TEST_CASE("adamw zero grad with zero decay is identity") {
    Param p(2, 3);
    Rng rng(5);
    for (double& v : p.value.data) v = rng.normal(0.0, 1.0);
    Matrix before = p.value;
    AdamW opt;
    opt.weight_decay = 0.0;
    opt.step(p);
    CHECK(max_abs_diff(p.value, before) == 0.0);
}

TEST_CASE("adamw first step on a unit gradient decreases by about lr") {
    Param p(1, 1);
    p.value(0, 0) = 1.0;
    p.grad(0, 0) = 1.0;
    AdamW opt;
    opt.lr = 0.1;
    opt.step(p);
    // hand recurrence: m=0.1, v=0.001, m̂=1, v̂=1 → Δ = 0.1/(1+1e-8)
    const double expect = 1.0 - 0.1 / (1.0 + 1e-8);
    CHECK(p.value(0, 0) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::fabs(1.0 - p.value(0, 0) - 0.1) < 1e-7);
    CHECK(p.grad(0, 0) == 0.0);
}

TEST_CASE("adamw decoupled decay shrinks value by exactly lr*wd*value") {
    Param p(1, 1);
    p.value(0, 0) = 2.0;
    AdamW opt;
    opt.lr = 0.1;
    opt.weight_decay = 0.01;
    opt.step(p);
    CHECK(p.value(0, 0) == doctest::Approx(2.0 - 0.1 * 0.01 * 2.0).epsilon(1e-15));
}

TEST_CASE("adamw multi-step matches an independent scalar recurrence") {
    Param p(1, 1);
    p.value(0, 0) = 0.7;
    AdamW opt;
    opt.lr = 0.05;
    opt.weight_decay = 0.001;

    double val = 0.7, m = 0.0, v = 0.0;
    Rng rng(21);
    for (int step = 1; step <= 5; ++step) {
        double g = rng.normal(0.0, 1.0);
        p.grad(0, 0) = g;
        opt.step(p);

        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        double mh = m / (1.0 - std::pow(0.9, step));
        double vh = v / (1.0 - std::pow(0.999, step));
        val -= 0.05 * (mh / (std::sqrt(vh) + 1e-8) + 0.001 * val);
        CHECK(p.value(0, 0) == doctest::Approx(val).epsilon(1e-12));
    }
}

TEST_CASE("adamw rejects non-finite gradients") {
    Param p(1, 2);
    p.grad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    AdamW opt;
    CHECK_THROWS_AS(opt.step(p), NumericsError);
}

TEST_CASE("finite differences: quadratic loss has near-exact gradients") {
    Param p(1, 6);
    Rng rng(9);
    for (double& v : p.value.data) v = rng.normal(0.0, 1.0);
    Matrix ones_col(6, 1, 1.0);
    auto loss = [&]() {
        Tape t;
        Val l = t.leaf(p);
        Val q = t.hadamard(l, l);
        Val s = t.matmul(q, t.constant(ones_col));
        t.backward(s);
        return t.value(s)(0, 0);
    };
    Rng coord_rng(1);
    double err = finite_diff_check({&p}, loss, 100, coord_rng);
    CHECK(err < 1e-6);
}

TEST_CASE("finite differences: two-layer mlp with mae loss") {
    Rng rng(23);
    Matrix x = random_matrix(4, 3, rng);
    Matrix target = random_matrix(4, 2, rng);
    for (double& v : target.data) v += 0.5;
    Param w1(3, 5), b1(1, 5), w2(5, 2), b2(1, 2);
    for (double& v : w1.value.data) v = rng.normal(0.0, 0.5);
    for (double& v : b1.value.data) v = rng.normal(0.0, 0.5);
    for (double& v : w2.value.data) v = rng.normal(0.0, 0.5);
    for (double& v : b2.value.data) v = rng.normal(0.0, 0.5);

    auto loss = [&]() {
        Tape t;
        Val h = t.relu(t.linear(t.constant(x), t.leaf(w1), t.leaf(b1)));
        Val y = t.linear(h, t.leaf(w2), t.leaf(b2));
        Val l = t.mae_loss(y, target);
        t.backward(l);
        return t.value(l)(0, 0);
    };
    Rng coord_rng(2);
    double err = finite_diff_check({&w1, &b1, &w2, &b2}, loss, 20, coord_rng);
    CHECK(err < 1e-3);
}

TEST_CASE("finite differences: zero-parameter closure returns zero") {
    Rng coord_rng(3);
    double err = finite_diff_check({}, []() { return 1.0; }, 20, coord_rng);
    CHECK(err == 0.0);
}

TEST_CASE("finite differences hold for every tape op") {
    // one structured closure per op, random small instances
    Rng rng(31);
    Matrix x = random_matrix(3, 4, rng);
    Matrix m43 = random_matrix(4, 3, rng);
    Param bias(1, 4);
    bias.value(0, 0) = 0.3;
    bias.value(0, 2) = -0.2;

    auto check_op = [&](const char* name, auto build) {
        Param p(3, 4);
        Rng prng(derive_seed(77, name));
        for (double& v : p.value.data) v = prng.normal(0.3, 0.8);
        auto loss = [&]() {
            Tape t;
            Val out = build(t, t.leaf(p));
            Val l = t.mae_loss(out, Matrix(t.value(out).rows, t.value(out).cols, 0.25));
            t.backward(l);
            return t.value(l)(0, 0);
        };
        Rng coord_rng(derive_seed(78, name));
        double err = finite_diff_check({&p}, loss, 12, coord_rng);
        INFO(name);
        CHECK(err < 1e-3);
    };

    check_op("matmul", [&](Tape& t, Val p) { return t.matmul(p, t.constant(m43)); });
    check_op("add", [&](Tape& t, Val p) { return t.add(p, t.constant(x)); });
    check_op("sub", [&](Tape& t, Val p) { return t.sub(t.constant(x), p); });
    check_op("hadamard", [&](Tape& t, Val p) { return t.hadamard(p, t.constant(x)); });
    check_op("relu", [&](Tape& t, Val p) { return t.relu(p); });
    check_op("sigmoid", [&](Tape& t, Val p) { return t.sigmoid(p); });
    check_op("tanh", [&](Tape& t, Val p) { return t.tanh_(p); });
    check_op("concat", [&](Tape& t, Val p) { return t.concat_cols({p, t.constant(x)}); });
    check_op("gather", [&](Tape& t, Val p) { return t.gather_rows(p, {2, 0, 1, 2}); });
    check_op("group_mean", [&](Tape& t, Val p) { return t.group_mean_rows(p, {1, 0, 1}, 2); });
    check_op("mean_all", [&](Tape& t, Val p) { return t.mean_all_rows(p); });
    check_op("bias", [&](Tape& t, Val p) { return t.add_row_bias(p, t.leaf(bias)); });

    // repeat_row needs a 1×C param
    {
        Param p(1, 4);
        Rng prng(derive_seed(77, "repeat"));
        for (double& v : p.value.data) v = prng.normal(0.3, 0.8);
        auto loss = [&]() {
            Tape t;
            Val out = t.repeat_row(t.leaf(p), 5);
            Val l = t.mae_loss(out, Matrix(5, 4, 0.25));
            t.backward(l);
            return t.value(l)(0, 0);
        };
        Rng coord_rng(derive_seed(78, "repeat"));
        CHECK(finite_diff_check({&p}, loss, 12, coord_rng) < 1e-3);
    }
}

TEST_CASE("leaf nodes are cached and gradients accumulate across uses") {
    Param p(1, 2);
    p.value(0, 0) = 1.5;
    p.value(0, 1) = -0.5;
    Tape t;
    Val a = t.leaf(p);
    Val b = t.leaf(p);
    CHECK(a == b);

    Val s = t.add(a, b); // 2p
    Val l = t.mae_loss(s, Matrix(1, 2, -10.0)); // all diffs positive
    t.backward(l);
    // d/dp mean(|2p + 10|) over 2 entries = 2 * (1/2) = 1 per coordinate
    CHECK(p.grad(0, 0) == doctest::Approx(1.0));
    CHECK(p.grad(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("backward requires a scalar loss") {
    Tape t;
    Val v = t.constant(Matrix(2, 2, 1.0));
    CHECK_THROWS_AS(t.backward(v), ConfigError);
}

TEST_CASE("gather and group_mean validate their index arguments") {
    Tape t;
    Val v = t.constant(Matrix(3, 2, 1.0));
    CHECK_THROWS_AS(t.gather_rows(v, {3}), ConfigError);
    CHECK_THROWS_AS(t.group_mean_rows(v, {0, 0}, 1), ConfigError);
    CHECK_THROWS_AS(t.group_mean_rows(v, {0, 0, 0}, 2), ConfigError); // group 1 empty
}
