#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "itrboost/dataset.hpp"
#include "itrboost/rng.hpp"

using namespace itrboost;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/itrboost_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
    void write(const std::string& content) {
        std::ofstream out(path);
        out << content;
    }
};

Dataset tiny_dataset() {
    return Dataset({{0.5, -0.25, 1.0}, {2.0, 3.0, -1.0}}, {1.0, -1.0, 1.0},
                   {1.5, 0.0, -2.25}, {0.5, 0.5, 0.5});
}

}  // namespace

TEST_CASE("load_csv parses a 2-row file with constant propensity") {
    TempFile f("load2.csv");
    f.write("x_1,treatment,outcome\n0.5,1,1.0\n-0.5,-1,2.0\n");
    const Dataset d = load_csv(f.path, ConstantPropensity{0.5});
    CHECK(d.n_rows() == 2);
    CHECK(d.n_features() == 1);
    CHECK(d.covariate(0, 0) == 0.5);
    CHECK(d.treatment(0) == 1.0);
    CHECK(d.treatment(1) == -1.0);
    CHECK(d.outcome(1) == 2.0);
    CHECK(d.propensity(0) == 0.5);
    CHECK(d.propensity(1) == 0.5);
}

TEST_CASE("load_csv rejects treatment 0 naming the row") {
    TempFile f("badtrt.csv");
    f.write("x_1,treatment,outcome\n0.5,1,1.0\n0.2,0,2.0\n");
    CHECK_THROWS_WITH_AS(load_csv(f.path),
                         doctest::Contains("row 2"), std::runtime_error);
}

TEST_CASE("load_csv reads a propensity column") {
    TempFile f("prop.csv");
    std::string body = "x_1,x_2,x_3,treatment,outcome,propensity\n";
    for (int i = 0; i < 5; ++i) {
        body += "0." + std::to_string(i) + ",1.0,2.0," + (i % 2 ? "1" : "-1") +
                ",0.5,0.5\n";
    }
    f.write(body);
    const Dataset d = load_csv(f.path, ColumnPropensity{"propensity"});
    CHECK(d.n_rows() == 5);
    CHECK(d.n_features() == 3);
    for (std::size_t i = 0; i < 5; ++i) CHECK(d.propensity(i) == 0.5);
}

TEST_CASE("load_csv reports missing columns and malformed rows") {
    TempFile f("missing.csv");
    f.write("x_1,outcome\n1.0,2.0\n");
    CHECK_THROWS_WITH_AS(load_csv(f.path), doctest::Contains("treatment"),
                         std::runtime_error);

    TempFile g("malformed.csv");
    g.write("x_1,treatment,outcome\n1.0,1\n");
    CHECK_THROWS(load_csv(g.path));

    TempFile h("badprop.csv");
    h.write("x_1,treatment,outcome,pi\n1.0,1,2.0,1.5\n");
    CHECK_THROWS_WITH_AS(load_csv(h.path, ColumnPropensity{"pi"}),
                         doctest::Contains("propensity"), std::runtime_error);
}

TEST_CASE("CSV round trip reproduces every field exactly") {
    CounterRng rng(42, 7);
    std::vector<std::vector<double>> cols(3);
    std::vector<double> a, y, pi;
    for (int i = 0; i < 40; ++i) {
        for (auto& c : cols) c.push_back(rng.next_uniform(-5, 5));
        a.push_back(rng.next_uniform01() < 0.5 ? -1.0 : 1.0);
        y.push_back(rng.next_normal() * 1e3);
        pi.push_back(0.5);
    }
    const Dataset d(cols, a, y, pi);
    TempFile f("roundtrip.csv");
    write_csv(f.path, d);
    const Dataset back = load_csv(f.path);
    REQUIRE(back.n_rows() == d.n_rows());
    REQUIRE(back.n_features() == d.n_features());
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        for (std::size_t j = 0; j < d.n_features(); ++j) {
            CHECK(back.covariate(i, j) == d.covariate(i, j));
        }
        CHECK(back.treatment(i) == d.treatment(i));
        CHECK(back.outcome(i) == d.outcome(i));
    }
}

TEST_CASE("Dataset invariants are enforced") {
    CHECK_THROWS(Dataset({{1.0}}, {0.5}, {1.0}, {0.5}));       // bad treatment
    CHECK_THROWS(Dataset({{1.0}}, {1.0}, {1.0}, {0.0}));       // propensity at 0
    CHECK_THROWS(Dataset({{1.0}}, {1.0}, {1.0}, {1.0}));       // propensity at 1
    CHECK_THROWS(Dataset({{1.0, 2.0}}, {1.0}, {1.0}, {0.5}));  // length mismatch
    const double nan = std::nan("");
    CHECK_THROWS(Dataset({{nan}}, {1.0}, {1.0}, {0.5}));
}

TEST_CASE("make_folds: singleton folds at k=n") {
    const auto fa = make_folds(10, 10, 1);
    std::set<int> seen(fa.fold_of.begin(), fa.fold_of.end());
    CHECK(seen.size() == 10);
}

TEST_CASE("make_folds: balanced sizes and determinism") {
    const auto fa = make_folds(10, 3, 7);
    std::vector<int> sizes(3, 0);
    for (int f : fa.fold_of) sizes[f]++;
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<int>{3, 3, 4});

    const auto again = make_folds(10, 3, 7);
    CHECK(fa.fold_of == again.fold_of);

    const auto other = make_folds(10, 3, 8);
    CHECK(fa.fold_of != other.fold_of);
}

TEST_CASE("make_folds: partition property over random shapes") {
    CounterRng rng(3, 1);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng.next_u64() % 50;
        const int k = 2 + static_cast<int>(rng.next_u64() % (n - 1));
        const auto fa = make_folds(n, k, rng.next_u64());
        std::vector<int> sizes(k, 0);
        for (int f : fa.fold_of) {
            REQUIRE(f >= 0);
            REQUIRE(f < k);
            sizes[f]++;
        }
        const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
        CHECK(*hi - *lo <= 1);
        std::size_t total = 0;
        for (int f = 0; f < k; ++f) total += fa.fold_indices(f).size();
        CHECK(total == n);
    }
}

TEST_CASE("make_folds rejects bad k") {
    CHECK_THROWS(make_folds(10, 1, 0));
    CHECK_THROWS(make_folds(10, 11, 0));
}

TEST_CASE("split: identity, singleton, and filter") {
    const Dataset d = tiny_dataset();
    const Dataset all = split(d, {0, 1, 2});
    CHECK(all.n_rows() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(all.outcome(i) == d.outcome(i));

    const Dataset one = split(d, {0});
    CHECK(one.n_rows() == 1);
    CHECK(one.covariate(0, 0) == d.covariate(0, 0));
    CHECK(one.covariate(0, 1) == d.covariate(0, 1));

    std::vector<std::size_t> plus;
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        if (d.treatment(i) == 1.0) plus.push_back(i);
    }
    const Dataset arm = split(d, plus);
    for (std::size_t i = 0; i < arm.n_rows(); ++i) CHECK(arm.treatment(i) == 1.0);
}

TEST_CASE("split: disjoint unions concatenate rows") {
    const Dataset d = tiny_dataset();
    const Dataset a = split(d, {0, 2});
    const Dataset b = split(d, {1});
    const Dataset u = split(d, {0, 2, 1});
    CHECK(u.outcome(0) == a.outcome(0));
    CHECK(u.outcome(1) == a.outcome(1));
    CHECK(u.outcome(2) == b.outcome(0));
}

TEST_CASE("split rejects empty and out-of-range index sets") {
    const Dataset d = tiny_dataset();
    CHECK_THROWS(split(d, {}));
    CHECK_THROWS(split(d, {3}));
}
