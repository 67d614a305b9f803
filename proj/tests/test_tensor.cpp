#include <doctest.h>

#include <cmath>

#include "kge/tensor.hpp"
#include "test_util.hpp"

using namespace kge;
using test_util::grad_close;
using test_util::numeric_grad;

TEST_CASE("matmul forward examples and dimension errors") {
    Tensor eye = Tensor::from({2, 2}, {1, 0, 0, 1});
    Tensor v = Tensor::from({2, 1}, {3, 4});
    Tensor out = ops::matmul(nullptr, eye, v);
    CHECK(out.data() == std::vector<double>{3, 4});

    Tensor a = Tensor::from({1, 2}, {1, 2});
    Tensor b = Tensor::from({2, 1}, {3, 4});
    CHECK(ops::matmul(nullptr, a, b).item() == 11);

    Tensor bad_a = Tensor::zeros({2, 3});
    Tensor bad_b = Tensor::zeros({4, 2});
    CHECK_THROWS_WITH_AS(ops::matmul(nullptr, bad_a, bad_b),
                         doctest::Contains("[2x3]"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(ops::matmul(nullptr, bad_a, bad_b),
                         doctest::Contains("[4x2]"), std::invalid_argument);
}

TEST_CASE("elementwise forward examples") {
    Tensor a = Tensor::from({3}, {1, 2, 3});
    Tensor ones = Tensor::from({3}, {1, 1, 1});
    CHECK(ops::mul(nullptr, a, ones).data() == std::vector<double>{1, 2, 3});

    Tensor x = Tensor::from({2}, {2, 3});
    Tensor y = Tensor::from({2}, {1, -1});
    CHECK(ops::mul(nullptr, x, y).data() == std::vector<double>{2, -3});

    Tensor z = Tensor::from({2}, {0, 0});
    CHECK(ops::add(nullptr, z, z).data() == std::vector<double>{0, 0});

    Tensor w = Tensor::zeros({3});
    CHECK_THROWS_AS(ops::add(nullptr, x, w), std::invalid_argument);

    // commutativity
    Rng rng(5);
    Tensor r1 = Tensor::uniform({16}, -1, 1, rng);
    Tensor r2 = Tensor::uniform({16}, -1, 1, rng);
    CHECK(ops::mul(nullptr, r1, r2).data() == ops::mul(nullptr, r2, r1).data());
    CHECK(ops::add(nullptr, r1, r2).data() == ops::add(nullptr, r2, r1).data());
}

TEST_CASE("triple product pattern is argument-symmetric") {
    // (a o b) . c == (a o c) . b, the rearrangement DistMult relies on
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor a = Tensor::uniform({32}, -1, 1, rng);
        Tensor b = Tensor::uniform({32}, -1, 1, rng);
        Tensor c = Tensor::uniform({32}, -1, 1, rng);
        const double left = ops::sum_all(nullptr, ops::mul(nullptr, ops::mul(nullptr, a, b), c)).item();
        const double right = ops::sum_all(nullptr, ops::mul(nullptr, ops::mul(nullptr, a, c), b)).item();
        CHECK(left == doctest::Approx(right).epsilon(1e-10));
    }
}

TEST_CASE("sigmoid op examples") {
    Tensor z = Tensor::from({3}, {0.0, -1000.0, std::log(3.0)});
    Tensor s = ops::sigmoid(nullptr, z);
    CHECK(s.data()[0] == 0.5);
    CHECK(s.data()[1] <= 1e-300);
    CHECK(std::isfinite(s.data()[1]));
    CHECK(s.data()[2] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("backward populates analytic gradients") {
    // loss = sum(x o x), grad = 2x
    Tape tape;
    Tensor x = Tensor::from({2}, {1, 2}, true);
    Tensor loss = ops::sum_all(&tape, ops::mul(&tape, x, x));
    tape.backward(loss);
    CHECK(x.grad()[0] == doctest::Approx(2.0));
    CHECK(x.grad()[1] == doctest::Approx(4.0));
}

TEST_CASE("backward on a constant loss leaves grads absent") {
    Tape tape;
    Tensor x = Tensor::from({2}, {1, 2});  // no requires_grad
    Tensor loss = ops::sum_all(&tape, ops::mul(&tape, x, x));
    tape.backward(loss);
    CHECK_FALSE(x.has_grad());
}

TEST_CASE("backward contract errors") {
    Tape tape;
    Tensor x = Tensor::from({2}, {1, 2}, true);
    Tensor y = ops::mul(&tape, x, x);
    CHECK_THROWS_AS(tape.backward(y), std::invalid_argument);  // non-scalar

    Tape tape2;
    Tensor loss = ops::sum_all(&tape2, ops::mul(&tape2, x, x));
    tape2.backward(loss);
    CHECK_THROWS_AS(tape2.backward(loss), std::runtime_error);  // second call
}

TEST_CASE("finite differences validate every op family") {
    Rng rng(23);
    auto check_leaf = [&](Tensor leaf, const std::function<Tensor(Tape*)>& build) {
        leaf.zero_grad();
        Tape tape;
        Tensor loss = build(&tape);
        tape.backward(loss);
        const auto numeric = numeric_grad([&]() { return build(nullptr).item(); }, leaf);
        CHECK(grad_close(leaf.grad(), numeric));
    };

    Tensor a = Tensor::uniform({3, 4}, -1, 1, rng, true);
    Tensor b = Tensor::uniform({4, 5}, -1, 1, rng, true);
    auto mm = [&](Tape* t) {
        return ops::mean_all(t, ops::sigmoid(t, ops::matmul(t, a, b)));
    };
    check_leaf(a, mm);
    check_leaf(b, mm);

    Tensor c = Tensor::uniform({6, 4}, -1, 1, rng, true);
    auto mnt = [&](Tape* t) { return ops::mean_all(t, ops::matmul_nt(t, a, c)); };
    check_leaf(a, mnt);
    check_leaf(c, mnt);

    Tensor d = Tensor::uniform({3, 4}, -1, 1, rng, true);
    auto ew = [&](Tape* t) {
        Tensor s = ops::sub(t, ops::mul(t, a, d), ops::add(t, a, d));
        return ops::sum_all(t, ops::mul_scalar(t, s, 0.7));
    };
    check_leaf(a, ew);
    check_leaf(d, ew);

    Tensor bias = Tensor::uniform({4}, -1, 1, rng, true);
    auto rowv = [&](Tape* t) { return ops::mean_all(t, ops::add_rowvec(t, a, bias)); };
    check_leaf(a, rowv);
    check_leaf(bias, rowv);

    Tensor table = Tensor::uniform({5, 3}, -1, 1, rng, true);
    auto gth = [&](Tape* t) {
        return ops::mean_all(t, ops::sigmoid(t, ops::gather_rows(t, table, {0, 2, 2, 4})));
    };
    check_leaf(table, gth);

    auto slc = [&](Tape* t) {
        Tensor left = ops::slice_cols(t, a, 0, 2);
        Tensor right = ops::slice_cols(t, a, 2, 4);
        return ops::sum_all(t, ops::concat_cols(t, {ops::mul(t, left, right), left}));
    };
    check_leaf(a, slc);

    Tensor q = Tensor::uniform({2, 3, 4}, -1, 1, rng, true);
    Tensor k = Tensor::uniform({2, 3, 4}, -1, 1, rng, true);
    auto att = [&](Tape* t) {
        Tensor scores = ops::softmax_lastdim(t, ops::bmm_nt(t, q, k));
        return ops::mean_all(t, ops::bmm_nn(t, scores, k));
    };
    check_leaf(q, att);
    check_leaf(k, att);

    auto rdot = [&](Tape* t) { return ops::mean_all(t, ops::rowwise_dot(t, a, d)); };
    check_leaf(a, rdot);

    auto unit = [&](Tape* t) { return ops::mean_all(t, ops::unit_rows(t, a)); };
    check_leaf(a, unit);

    Tensor logits = Tensor::uniform({3, 7}, -2, 2, rng, true);
    std::vector<double> lab(21, 0.0);
    for (std::size_t i = 0; i < lab.size(); ++i) lab[i] = (i % 5 == 0) ? 1.0 : 0.0;
    Tensor labels = Tensor::from({3, 7}, lab);
    auto bce = [&](Tape* t) { return ops::bce_with_logits_mean(t, logits, labels); };
    check_leaf(logits, bce);

    auto rshp = [&](Tape* t) {
        return ops::mean_all(t, ops::sigmoid(t, ops::reshape(t, a, {4, 3})));
    };
    check_leaf(a, rshp);
}

TEST_CASE("softmax rows sum to one") {
    Rng rng(29);
    Tensor x = Tensor::uniform({4, 9}, -3, 3, rng);
    Tensor y = ops::softmax_lastdim(nullptr, x);
    for (std::int64_t i = 0; i < 4; ++i) {
        double sum = 0.0;
        for (std::int64_t j = 0; j < 9; ++j) sum += y.data()[i * 9 + j];
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("dropout zero rate is the identity and masks scale otherwise") {
    Rng rng(31);
    Tensor x = Tensor::uniform({100}, -1, 1, rng);
    Tensor same = ops::dropout(nullptr, x, 0.0, rng);
    CHECK(same.same_impl(x));

    Rng mask_rng(9);
    Tensor dropped = ops::dropout(nullptr, x, 0.5, mask_rng);
    int zeros = 0;
    for (std::int64_t i = 0; i < 100; ++i) {
        const double v = dropped.data()[static_cast<std::size_t>(i)];
        if (v == 0.0) ++zeros;
        else CHECK(v == doctest::Approx(2.0 * x.data()[static_cast<std::size_t>(i)]));
    }
    CHECK(zeros > 20);
    CHECK(zeros < 80);
}

TEST_CASE("uniform tensors are deterministic under a fixed seed") {
    Rng r1(123), r2(123);
    Tensor a = Tensor::uniform({64}, -1, 1, r1);
    Tensor b = Tensor::uniform({64}, -1, 1, r2);
    CHECK(a.data() == b.data());
}

TEST_CASE("finite checks flag poisoned tensors") {
    Tensor x = Tensor::from({2}, {1.0, 2.0});
    CHECK(x.all_finite());
    x.data()[1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(x.all_finite());
}
