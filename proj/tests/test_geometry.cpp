#include <doctest.h>

#include "geometry.hpp"

using namespace eyespot;

TEST_CASE("rect center uses the pixel-grid midpoint") {
    CHECK(Rect{0, 0, 3, 3}.center().x == doctest::Approx(1.0));
    CHECK(Rect{0, 0, 3, 3}.center().y == doctest::Approx(1.0));
    CHECK(Rect{10, 20, 4, 2}.center().x == doctest::Approx(11.5));
    CHECK(Rect{10, 20, 4, 2}.center().y == doctest::Approx(20.5));
    CHECK(Rect{5, 5, 1, 1}.center().x == doctest::Approx(5.0));
}

TEST_CASE("rect contains is inclusive of the last pixel") {
    const Rect r{2, 3, 4, 2};
    CHECK(r.contains(2, 3));
    CHECK(r.contains(5, 4));
    CHECK(!r.contains(6, 4));
    CHECK(!r.contains(5, 5));
    CHECK(!r.contains(1.9, 3));
    CHECK(r.contains(3.5, 3.5));
}

TEST_CASE("rect area") {
    CHECK(Rect{0, 0, 7, 5}.area() == 35);
    CHECK(Rect{0, 0, 0, 5}.area() == 0);
}

TEST_CASE("iou of identical boxes is one") {
    const Rect r{3, 4, 10, 6};
    CHECK(iou(r, r) == doctest::Approx(1.0));
}

TEST_CASE("iou of disjoint boxes is zero") {
    CHECK(iou(Rect{0, 0, 5, 5}, Rect{5, 0, 5, 5}) == doctest::Approx(0.0));
    CHECK(iou(Rect{0, 0, 5, 5}, Rect{20, 20, 5, 5}) == doctest::Approx(0.0));
}

TEST_CASE("iou hand cases") {
    // 10x10 boxes overlapping by a 5x10 strip: 50 / 150
    CHECK(iou(Rect{0, 0, 10, 10}, Rect{5, 0, 10, 10}) == doctest::Approx(50.0 / 150.0));
    // nested quarter: 25 / 100
    CHECK(iou(Rect{0, 0, 10, 10}, Rect{0, 0, 5, 5}) == doctest::Approx(25.0 / 100.0));
    // single shared pixel: 1 / (100 + 100 - 1)
    CHECK(iou(Rect{0, 0, 10, 10}, Rect{9, 9, 10, 10}) == doctest::Approx(1.0 / 199.0));
}

TEST_CASE("iou is symmetric") {
    const Rect a{1, 2, 8, 9};
    const Rect b{4, 4, 6, 3};
    CHECK(iou(a, b) == doctest::Approx(iou(b, a)));
}
