#include <catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace nnefx;
using testutil::load_model;
using testutil::slurp;

TEST_CASE("lenet5 parses with canonical structure") {
  NnefProgram p = load_model("lenet5.nnef");
  CHECK(p.name == "lenet5");
  CHECK(p.inputs == IdentList{"e1"});
  CHECK(p.outputs == IdentList{"out"});
  REQUIRE(p.instructions.size() == 24);
  CHECK(p.instructions[0].op == Op::External);
  CHECK(p.instructions[11].op == Op::Conv);
  CHECK(p.instructions[11].result == "o1");
  CHECK(p.instructions[23].op == Op::Softmax);
  CHECK(validate_ssa(p).ok());
}

TEST_CASE("named arguments normalize to the canonical order") {
  // Same conv written positionally and with shuffled named arguments.
  NnefProgram a = parse_program(
      "graph g(e1) -> (out) {\n"
      "  e1 = external(shape = [1, 4, 4]);\n"
      "  v1 = variable(shape = [2, 1, 3, 3], label = 'f');\n"
      "  v2 = variable(shape = [2], label = 'b');\n"
      "  out = conv(e1, v1, v2, stride = [1, 1], dilation = [1, 1], padding = [(1, 1), (1, 1)], groups = 1);\n"
      "}\n");
  NnefProgram b = parse_program(
      "graph g(e1) -> (out) {\n"
      "  e1 = external(shape = [1, 4, 4]);\n"
      "  v1 = variable(label = 'f', shape = [2, 1, 3, 3]);\n"
      "  v2 = variable(shape = [2], label = 'b');\n"
      "  out = conv(e1, v1, v2, groups = 1, padding = [(1, 1), (1, 1)], stride = [1, 1], dilation = [1, 1]);\n"
      "}\n");
  CHECK(serialize(a) == serialize(b));
}

TEST_CASE("serialize and reparse is the identity on the corpus") {
  for (const char* file : {"lenet5.nnef", "branched.nnef", "chain.nnef", "multiout.nnef", "overlap.nnef"}) {
    NnefProgram p = load_model(file);
    std::string once = serialize(p);
    NnefProgram q = parse_program(once);
    CHECK(serialize(q) == once);
  }
}

TEST_CASE("unknown operation is a parse error") {
  CHECK_THROWS_MATCHES(
      parse_program("graph g(e1) -> (out) {\n"
                    "  e1 = external(shape = [1, 2, 2]);\n"
                    "  out = gelu(e1);\n"
                    "}\n"),
      Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.kind() == ErrorKind::ParseError;
      }));
}

TEST_CASE("arity and argument-kind violations are rejected") {
  // split with two ranges: the text form binds one result per instruction.
  CHECK_THROWS_AS(parse_program("graph g(e1) -> (out) {\n"
                                "  e1 = external(shape = [1, 4, 4]);\n"
                                "  out = split(e1, axis = 1, ranges = [(0, 2), (2, 4)]);\n"
                                "}\n"),
                  Error);
  // missing required argument
  CHECK_THROWS_AS(parse_program("graph g(e1) -> (out) {\n"
                                "  e1 = external(shape = [1, 4, 4]);\n"
                                "  out = conv(e1);\n"
                                "}\n"),
                  Error);
  // duplicate named argument
  CHECK_THROWS_AS(parse_program("graph g(e1) -> (out) {\n"
                                "  e1 = external(shape = [1, 4, 4], shape = [1, 4, 4]);\n"
                                "  out = relu(e1);\n"
                                "}\n"),
                  Error);
}

TEST_CASE("SSA violations are reported with the offending variable") {
  NnefProgram doubled = parse_program(
      "graph g(e1) -> (out) {\n"
      "  e1 = external(shape = [1, 2, 2]);\n"
      "  out = relu(e1);\n"
      "  out = relu(e1);\n"
      "}\n");
  ValidationReport r = validate_ssa(doubled);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].kind == ViolationKind::DoubleAssign);
  CHECK(r.violations[0].variable == "out");

  NnefProgram early = parse_program(
      "graph g(e1) -> (out) {\n"
      "  e1 = external(shape = [1, 2, 2]);\n"
      "  out = relu(o1);\n"
      "  o1 = relu(e1);\n"
      "}\n");
  r = validate_ssa(early);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].kind == ViolationKind::UseBeforeDef);
  CHECK(r.violations[0].variable == "o1");

  NnefProgram unassigned = parse_program(
      "graph g(e1) -> (out) {\n"
      "  e1 = external(shape = [1, 2, 2]);\n"
      "  o1 = relu(e1);\n"
      "}\n");
  r = validate_ssa(unassigned);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].kind == ViolationKind::MissingOutputAssignment);
}

TEST_CASE("item files parse and round-trip") {
  NnefProgram program = load_model("branched.nnef");
  Assignment assignment = read_assignment_file(testutil::models_dir() + "/branched.assign3.json");
  std::vector<ItemProgram> items = split(program, assignment);
  REQUIRE(items.size() == 3);
  for (const auto& item : items) {
    std::string text = serialize(item);
    ItemProgram back = parse_item_program(text);
    CHECK(back.item.item_id == item.item.item_id);
    CHECK(back.item.inputs == item.item.inputs);
    CHECK(back.item.outputs == item.item.outputs);
    CHECK(serialize(back) == text);
  }
}

TEST_CASE("parse_any distinguishes plain and item files") {
  auto [plain, no_item] = parse_any(slurp(testutil::models_dir() + "/lenet5.nnef"));
  CHECK_FALSE(no_item.has_value());
  CHECK(plain.name == "lenet5");

  NnefProgram program = load_model("chain.nnef");
  Assignment assignment = read_assignment_file(testutil::models_dir() + "/chain.assign2.json");
  std::string item_text = serialize(split(program, assignment)[0]);
  auto [graph, item] = parse_any(item_text);
  REQUIRE(item.has_value());
  CHECK(item->item_id == "item1");
  CHECK(graph.name == "chain");
}

TEST_CASE("two send_var of one handle in one file is a syntax error") {
  CHECK_THROWS_AS(parse_item_program(
                      "graph g(e1) -> (out)\n"
                      "graphitem item1 g(e1) -> (o1_s, out)\n"
                      "{\n"
                      "  e1 = external(shape = [1, 2, 2]);\n"
                      "  o1 = relu(e1);\n"
                      "  o1_s = send_var([item2], o1);\n"
                      "  o1_s = send_var([item2], o1);\n"
                      "  out = relu(o1);\n"
                      "}\n"),
                  Error);
}

TEST_CASE("parser reports line and column on malformed input") {
  try {
    parse_program("graph g(e1) -> (out) {\n  e1 = external(shape = [1,;\n}\n");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 0);
  }
}
