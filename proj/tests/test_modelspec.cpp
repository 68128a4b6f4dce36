#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "robseq/modelspec.hpp"

using namespace robseq;

TEST_CASE("model spec grammar") {
  const auto g = spec::parse_model("gaussian:mu=0.5");
  CHECK(dynamic_cast<const GaussianModel*>(g.get()) != nullptr);
  CHECK(static_cast<const GaussianModel&>(*g).mu() == 0.5);
  CHECK(static_cast<const GaussianModel&>(*g).sigma() == 1.0);

  const auto c = spec::parse_model("cauchy:loc=-1,scale=10");
  const auto* cm = dynamic_cast<const CauchyModel*>(c.get());
  REQUIRE(cm != nullptr);
  CHECK(cm->loc() == -1.0);
  CHECK(cm->scale() == 10.0);

  const auto m = spec::parse_model(
      "mixture:0.99*gaussian(mu=0)+0.01*cauchy(loc=-1,scale=10)");
  const auto* mm = dynamic_cast<const MixtureModel*>(m.get());
  REQUIRE(mm != nullptr);
  CHECK(mm->components().size() == 2);
  CHECK(mm->components()[0].first == 0.99);

  CHECK_THROWS_AS(spec::parse_model("gaussian:mu=0,bogus=1"), spec::SpecError);
  CHECK_THROWS_AS(spec::parse_model("gaussian:sigma=1"), spec::SpecError);
  CHECK_THROWS_AS(spec::parse_model("uniform:a=0,b=1"), spec::SpecError);
  CHECK_THROWS_AS(spec::parse_model("gaussian:mu=abc"), spec::SpecError);
}

TEST_CASE("discrete file parsing") {
  const std::string path = "/tmp/robseq_test_discrete.txt";
  {
    std::ofstream out(path);
    out << "# atom prob\n0.0 0.5\n1.0 0.5\n";
  }
  const auto dist = spec::parse_discrete_file(path);
  CHECK(dist.support == std::vector<double>{0.0, 1.0});
  CHECK(dist.probs == std::vector<double>{0.5, 0.5});

  const auto model = spec::parse_model("discrete:file=" + path);
  CHECK(model->total_mass() == doctest::Approx(1.0));
  std::remove(path.c_str());

  CHECK_THROWS_AS(spec::parse_discrete_file("/nonexistent/nope.txt"),
                  spec::SpecError);
}

TEST_CASE("interval null and alternative class specs") {
  CHECK(spec::is_interval_null("gaussian-interval:a=-0.5,b=0.5"));
  CHECK(!spec::is_interval_null("gaussian:mu=0"));
  const auto null = spec::parse_interval_null("gaussian-interval:a=-0.5,b=0.5");
  CHECK(null.a == -0.5);
  CHECK(null.b == 0.5);
  CHECK_THROWS_AS(spec::parse_interval_null("gaussian-interval:a=1,b=0"),
                  spec::SpecError);

  const auto neq = spec::parse_alt_class("gaussian-neq:mu=0");
  CHECK(neq.project(0.0) == doctest::Approx(1e-8));
  const auto outside = spec::parse_alt_class("gaussian-outside:a=-0.5,b=0.5");
  CHECK(outside.project(0.2) == 0.5);
  CHECK_THROWS_AS(spec::parse_alt_class("gaussian-inside:a=0,b=1"),
                  spec::SpecError);
}
