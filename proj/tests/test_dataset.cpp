#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "gbnn/dataset.hpp"
#include "gbnn/errors.hpp"

using namespace gbnn;

namespace {

Dataset load_text(const std::string& text, const LoadOptions& options = {}) {
    std::istringstream in(text);
    return load_table(csv::read(in, options.header), options);
}

}  // namespace

TEST_CASE("three-row numeric regression") {
    const Dataset d = load_text("x1,x2,y\n1,2,0.5\n3,4,1.5\n5,6,-2\n");
    CHECK(d.size() == 3);
    CHECK(d.task() == TaskKind::regression());
    CHECK(d.targets == Matrix{{0.5}, {1.5}, {-2.0}});
    CHECK(d.features == Matrix{{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
    CHECK(d.schema.target == "y");
}

TEST_CASE("categorical columns become one-hot dummies in first-appearance order") {
    LoadOptions o;
    o.categorical = {"colour"};
    const Dataset d = load_text("colour,size,y\nb,1,0\na,2,1\nc,3,0\nb,4,1\n", o);
    REQUIRE(d.schema.columns[0].levels == std::vector<std::string>{"b", "a", "c"});
    CHECK(d.schema.width() == 4);
    CHECK(d.schema.feature_names() == std::vector<std::string>{"colour=b", "colour=a", "colour=c", "size"});
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d.features(i, 0) + d.features(i, 1) + d.features(i, 2) == 1.0);
    }
    CHECK(d.features(1, 1) == 1.0);
}

TEST_CASE("automatic dummy coding of text columns") {
    LoadOptions o;
    o.auto_categorical = true;
    const Dataset d = load_text("a,b,c\nx,o,positive\no,x,negative\nb,b,positive\n", o);
    CHECK(d.schema.width() == 6);
    CHECK(d.task() == TaskKind::binary());
}

TEST_CASE("binary labels are encoded by sorted order") {
    const Dataset d = load_text("x,label\n1,yes\n2,no\n3,yes\n");
    CHECK(d.class_labels() == std::vector<std::string>{"no", "yes"});
    CHECK(d.targets == Matrix{{1.0}, {-1.0}, {1.0}});
}

TEST_CASE("multi-class labels are one-hot with sorted classes") {
    const Dataset d = load_text("x,label\n1,versicolor\n2,setosa\n3,virginica\n4,setosa\n");
    CHECK(d.task() == TaskKind::multiclass(3));
    CHECK(d.class_labels() == std::vector<std::string>{"setosa", "versicolor", "virginica"});
    CHECK(d.targets == Matrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 1}, {1, 0, 0}});
}

TEST_CASE("task hints override detection") {
    LoadOptions o;
    o.task = TaskHint::MultiClass;
    const Dataset d = load_text("x,y\n1,1\n2,2\n3,3\n", o);
    CHECK(d.task() == TaskKind::multiclass(3));
    o.task = TaskHint::Binary;
    CHECK_THROWS_AS(load_text("x,y\n1,1\n2,2\n3,3\n", o), DataError);
    CHECK_THROWS_AS(task_hint_from_name("ordinal"), ConfigError);
}

TEST_CASE("target column by name or index") {
    LoadOptions o;
    o.target_column = "y";
    const Dataset a = load_text("y,x\n1,5\n2,6\n3,7\n", o);
    CHECK(a.features == Matrix{{5.0}, {6.0}, {7.0}});
    o.target_column = "0";
    o.header = false;
    const Dataset b = load_text("1,5\n2,6\n3,7\n", o);
    CHECK(b.targets == Matrix{{1.0}, {2.0}, {3.0}});
    o.target_column = "nope";
    o.header = true;
    CHECK_THROWS_AS(load_text("y,x\n1,5\n", o), DataError);
}

TEST_CASE("rows with missing values are dropped and counted") {
    const Dataset d = load_text("x,z,y\n1,?,1\n2,3,2\n,4,3\n5,6,NA\n7,8,4\n");
    CHECK(d.size() == 2);
    CHECK(d.dropped_rows == 3);
    CHECK_THROWS_AS(load_text("x,y\n?,1\n2,NA\n"), DataError);
}

TEST_CASE("unparseable cells are addressed by row and column") {
    try {
        load_text("x,z,y\n1,2,3\n4,oops,6\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
        CHECK(e.column() == 2);
    }
}

TEST_CASE("standardization") {
    LoadOptions o;
    o.standardize = true;
    const Dataset d = load_text("a,b,y\n1,10,0\n2,10,1\n3,10,0\n4,10,1\n", o);
    REQUIRE(d.schema.standardization);
    double sum = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        sum += d.features(i, 0);
        sq += d.features(i, 0) * d.features(i, 0);
        CHECK(d.features(i, 1) == 0.0);  // constant column keeps scale 1
    }
    CHECK(std::abs(sum) <= 1e-12);
    CHECK(sq / 4.0 == doctest::Approx(1.0));
}

TEST_CASE("applying a stored schema to new rows") {
    LoadOptions o;
    o.categorical = {"c"};
    o.standardize = true;
    const Dataset train = load_text("c,x,y\nred,1,a\nblue,2,b\nred,3,a\n", o);

    std::istringstream in("x,c\n2,blue\n5,green\n");
    const Dataset fresh = apply_schema(csv::read(in, true), train.schema);
    REQUIRE(fresh.features.cols() == 3);
    CHECK(fresh.targets.empty());
    const Standardizer& s = *train.schema.standardization;
    // green was never seen: both dummies stay at their zero level.
    CHECK(fresh.features(1, 0) == doctest::Approx((0.0 - s.mean[0]) / s.scale[0]));
    CHECK(fresh.features(1, 1) == doctest::Approx((0.0 - s.mean[1]) / s.scale[1]));
    CHECK(fresh.features(1, 2) == doctest::Approx((5.0 - s.mean[2]) / s.scale[2]));

    std::istringstream labelled("c,x,y\nblue,2,b\n");
    CHECK(apply_schema(csv::read(labelled, true), train.schema).targets == Matrix{{1.0}});
}

TEST_CASE("ringnorm: size, balance, determinism") {
    const Dataset a = ringnorm2d(200, 7);
    CHECK(a.size() == 200);
    CHECK(a.features.cols() == 2);
    std::size_t positives = 0;
    for (std::size_t i = 0; i < a.size(); ++i) positives += a.targets(i, 0) > 0.0;
    CHECK(positives == 100);
    CHECK(ringnorm2d(200, 7).features == a.features);
    CHECK_FALSE(ringnorm2d(200, 8).features == a.features);
    CHECK_THROWS_AS(ringnorm2d(1, 0), ConfigError);
}

TEST_CASE("ringnorm class means sit within three standard errors") {
    const std::size_t n = 20000;
    const Dataset d = ringnorm2d(n, 11);
    double wide[2] = {0, 0};
    double narrow[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        double* acc = d.raw_targets[i] == "1" ? wide : narrow;
        acc[0] += d.features(i, 0);
        acc[1] += d.features(i, 1);
    }
    const double half = static_cast<double>(n / 2);
    const double centre = 2.0 / std::numbers::sqrt2;
    for (int c = 0; c < 2; ++c) {
        // Class "1": mean 0, standard deviation 2. Class "-1": mean 2/sqrt(2), sd 1.
        CHECK(std::abs(wide[c] / half) <= 3.0 * 2.0 / std::sqrt(half));
        CHECK(std::abs(narrow[c] / half - centre) <= 3.0 * 1.0 / std::sqrt(half));
    }
}

TEST_CASE("written datasets load back unchanged") {
    const Dataset d = ringnorm2d(50, 1);
    std::ostringstream out;
    write_dataset_csv(out, d);
    const Dataset back = load_text(out.str());
    CHECK(back.features == d.features);
    CHECK(back.targets == d.targets);
    CHECK(back.class_labels() == d.class_labels());

    std::ostringstream again;
    write_dataset_csv(again, back);
    CHECK(again.str() == out.str());
}
