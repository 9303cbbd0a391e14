#include <cmath>

#include "abpcap/convexbody.hpp"
#include "doctest.h"

using namespace abpcap;

namespace {
constexpr double kPi = 3.14159265358979323846;

ConvexSection unit_square() {
  return ConvexSection::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
}
}  // namespace

TEST_CASE("validate: radial normals on the circle pass") {
  ContactConfig cfg;
  cfg.points = {{0, 1}, {1, 0}};
  cfg.normals = {{0, 1}, {1, 0}};
  cfg.values = {0, 0};
  CHECK(validate_contact_config(cfg).ok());
}

TEST_CASE("validate: inward normal breaks the supporting condition") {
  ContactConfig cfg;
  cfg.points = {{0, 1}, {1, 0}};
  cfg.normals = {{0, -1}, {1, 0}};
  cfg.values = {0, 0};
  const ValidationReport rep = validate_contact_config(cfg);
  REQUIRE(!rep.ok());
  bool found = false;
  for (const auto& issue : rep.issues) {
    if (issue.rule == "supporting" && issue.index_i == 0 && issue.index_j == 1) {
      found = true;
      CHECK(issue.magnitude == doctest::Approx(1.0));
    }
  }
  CHECK(found);
}

TEST_CASE("validate: collinear facet points pass") {
  ContactConfig cfg;
  cfg.points = {{-0.5, 1.0}, {0.0, 1.0}, {0.5, 1.0}};
  cfg.normals = {{0, 1}, {0, 1}, {0, 1}};
  cfg.values = {0.3, -0.1, 0.2};
  CHECK(validate_contact_config(cfg).ok());
}

TEST_CASE("validate: non-unit normal reported") {
  ContactConfig cfg;
  cfg.points = {{0, 1}};
  cfg.normals = {{0, 1.001}};
  cfg.values = {0};
  const ValidationReport rep = validate_contact_config(cfg);
  REQUIRE(!rep.ok());
  CHECK(rep.issues[0].rule == "unit_normal");
}

TEST_CASE("boundary_normal basics") {
  const ConvexSection d = ConvexSection::disk(1.0);
  const Vec2 n1 = d.boundary_normal({0, 1});
  CHECK(n1.x == doctest::Approx(0.0));
  CHECK(n1.y == doctest::Approx(1.0));

  const ConvexSection sq = unit_square();
  const Vec2 n2 = sq.boundary_normal({0, -1});
  CHECK(n2.x == doctest::Approx(0.0));
  CHECK(n2.y == doctest::Approx(-1.0));

  // Vertex: midpoint of the normal cone [e1, e2].
  const Vec2 n3 = sq.boundary_normal({1, 1});
  CHECK(n3.x == doctest::Approx(std::sqrt(0.5)));
  CHECK(n3.y == doctest::Approx(std::sqrt(0.5)));

  CHECK_THROWS_AS(sq.boundary_normal({0, 0}), NotOnBoundary);
}

TEST_CASE("sample_boundary: disk normals radial, validation passes") {
  const ConvexSection d = ConvexSection::disk(1.0);
  const ContactConfig cfg = sample_boundary(d, 4, 17);
  REQUIRE(cfg.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK((cfg.points[i] - cfg.normals[i]).norm() == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(validate_contact_config(cfg).ok());
}

TEST_CASE("sample_boundary: square normals axis-aligned, deterministic") {
  const ConvexSection sq = unit_square();
  const ContactConfig a = sample_boundary(sq, 100, 5);
  const ContactConfig b = sample_boundary(sq, 100, 5);
  REQUIRE(a.size() == 100);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(std::abs(a.normals[i].x) + std::abs(a.normals[i].y) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.points[i].x == b.points[i].x);
    CHECK(a.points[i].y == b.points[i].y);
  }
  CHECK(validate_contact_config(a).ok());
}

TEST_CASE("sample_boundary outputs always validate") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ConvexSection body =
        (seed % 2 == 0)
            ? ConvexSection::disk(0.5 + 0.1 * static_cast<double>(seed), {0.2, -0.3})
            : ConvexSection::polygon({{0, 0}, {2, 0.5}, {1.5, 2}, {-0.5, 1}});
    const ContactConfig cfg = sample_boundary(body, 12, seed);
    const ValidationReport rep = validate_contact_config(cfg);
    CHECK(rep.ok());
  }
}

TEST_CASE("supporting-plane test for boundary_normal on polygons") {
  const ConvexSection body = ConvexSection::polygon({{0, 0}, {3, 0}, {2, 2}, {0.5, 1.5}});
  const ContactConfig cfg = sample_boundary(body, 50, 23);
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const Vec2 nu = body.boundary_normal(cfg.points[i]);
    for (const Vec2& y : body.vertices()) {
      CHECK(nu.dot(y - cfg.points[i]) <= 1e-9);
    }
  }
}

TEST_CASE("support_sampled body materializes to the implied polygon") {
  // Support samples of the unit square.
  const ConvexSection s = ConvexSection::support_sampled(
      {{{1, 0}, 1.0}, {{0, 1}, 1.0}, {{-1, 0}, 1.0}, {{0, -1}, 1.0}});
  CHECK(s.vertices().size() == 4);
  CHECK(s.boundary_length() == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(s.distance_to_boundary({1.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(ConvexSection::support_sampled(
                      {{{1, 0}, -2.0}, {{-1, 0}, -2.0}, {{0, 1}, 1.0}}),
                  InvalidBody);
}

TEST_CASE("polygon constructor rejects bad input") {
  CHECK_THROWS_AS(ConvexSection::polygon({{0, 0}, {1, 0}}), InvalidBody);
  CHECK_THROWS_AS(ConvexSection::polygon({{0, 0}, {1, 0}, {2, 0}}), InvalidBody);
  // Non-convex (reflex vertex).
  CHECK_THROWS_AS(
      ConvexSection::polygon({{0, 0}, {2, 0}, {0.2, 0.2}, {0, 2}}), InvalidBody);
  CHECK(kPi > 3.0);
}
