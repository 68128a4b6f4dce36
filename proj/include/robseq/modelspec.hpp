#pragma once

#include <string>

#include "robseq/dists.hpp"
#include "robseq/plugin.hpp"
#include "robseq/ripr.hpp"

// The CLI's model-spec mini-grammar. Deliberately tiny; extension happens in
// code, not in the grammar.
//
//   gaussian:mu=0[,sigma=1]
//   cauchy:loc=-1,scale=10
//   discrete:file=PATH              (lines: "<atom> <prob>")
//   mixture:W*TYPE(ARGS)+W*TYPE(ARGS)+...
//   gaussian-interval:a=-0.5,b=0.5  (composite null, interval of means)
//   gaussian-neq:mu=0               (alternative class {mu != mu0})
//   gaussian-outside:a=-0.5,b=0.5   (alternative class {mu<=a or mu>=b})
//
// Parse errors throw SpecError; the CLI maps those to exit code 64.
namespace robseq::spec {

struct SpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// simple density models: gaussian, cauchy, discrete, mixture
ModelPtr parse_model(const std::string& text);

// discrete distribution from a two-column file
DiscreteDist parse_discrete_file(const std::string& path);

struct IntervalNull {
  double a = 0.0;
  double b = 0.0;
};
IntervalNull parse_interval_null(const std::string& text);

AlternativeClass parse_alt_class(const std::string& text);

// true if the text names a composite (interval) null rather than a model
bool is_interval_null(const std::string& text);

}  // namespace robseq::spec
