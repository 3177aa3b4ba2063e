#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "astprove/lincons.hpp"

using namespace astprove;
using namespace astprove::lincons;

TEST_CASE("solve minimizes over free variables exactly") {
  LinSystem sys;
  sys.add_var("x");
  sys.add_var("y");
  sys.add({Rat(1), Rat(0)}, Rel::Ge, Rat(1));
  sys.add({Rat(0), Rat(1)}, Rel::Ge, Rat(2));
  sys.set_objective({Rat(1), Rat(1)});
  auto res = solve(sys);
  REQUIRE(res.status == Status::Feasible);
  CHECK(res.objective_value == 3);
  CHECK(res.assignment[0] == 1);
  CHECK(res.assignment[1] == 2);
}

TEST_CASE("rational data stays rational") {
  LinSystem sys;
  sys.add_var("x");
  sys.add({Rat(3)}, Rel::Ge, Rat(1));  // 3x >= 1
  sys.set_objective({Rat(1)});
  auto res = solve(sys);
  REQUIRE(res.status == Status::Feasible);
  CHECK(res.objective_value == Rat(1, 3));
  CHECK(res.assignment[0] == Rat(1, 3));
}

TEST_CASE("infeasible and unbounded are reported as such") {
  LinSystem bad;
  bad.add_var("x");
  bad.add({Rat(1)}, Rel::Ge, Rat(1));
  bad.add({Rat(-1)}, Rel::Ge, Rat(0));  // x <= 0 contradicts x >= 1
  CHECK(solve(bad).status == Status::Infeasible);

  LinSystem unb;
  unb.add_var("x");
  unb.add({Rat(1)}, Rel::Le, Rat(5));
  unb.set_objective({Rat(1)});  // minimize x with x free below
  CHECK(solve(unb).status == Status::Unbounded);
}

TEST_CASE("equalities and nonnegative variables") {
  LinSystem sys;
  sys.add_var("x");
  sys.add_var("y");
  sys.add({Rat(1), Rat(1)}, Rel::Eq, Rat(5));
  sys.add({Rat(1), Rat(-1)}, Rel::Eq, Rat(1));
  auto res = solve(sys);
  REQUIRE(res.status == Status::Feasible);
  CHECK(res.assignment[0] == 3);
  CHECK(res.assignment[1] == 2);

  LinSystem nn;
  nn.add_var("x", /*nonneg=*/true);
  nn.add({Rat(1)}, Rel::Ge, Rat(-5));
  nn.set_objective({Rat(1)});
  auto r2 = solve(nn);
  REQUIRE(r2.status == Status::Feasible);
  CHECK(r2.objective_value == 0);
}

TEST_CASE("short coefficient vectors are padded at solve time") {
  LinSystem sys;
  sys.add_var("x");
  sys.add({Rat(1)}, Rel::Ge, Rat(2));  // before y exists
  sys.add_var("y");
  sys.add({Rat(0), Rat(1)}, Rel::Ge, Rat(7));
  sys.set_objective({Rat(1), Rat(1)});
  auto res = solve(sys);
  REQUIRE(res.status == Status::Feasible);
  CHECK(res.objective_value == 9);
}

TEST_CASE("degenerate systems do not cycle") {
  // Classic degeneracy: many tight constraints through one vertex.
  LinSystem sys;
  sys.add_var("x", true);
  sys.add_var("y", true);
  sys.add_var("z", true);
  sys.add({Rat(1), Rat(1), Rat(1)}, Rel::Le, Rat(0));
  sys.add({Rat(1), Rat(-1), Rat(0)}, Rel::Le, Rat(0));
  sys.add({Rat(0), Rat(1), Rat(-1)}, Rel::Le, Rat(0));
  sys.set_objective({Rat(-1), Rat(-1), Rat(-1)});
  auto res = solve(sys);
  REQUIRE(res.status == Status::Feasible);
  CHECK(res.objective_value == 0);
}

TEST_CASE("polyhedron emptiness is decided exactly") {
  Polyhedron p(2);
  p.add_ge({Rat(1), Rat(0)}, Rat(0));
  p.add_ge({Rat(-1), Rat(0)}, Rat(-10));
  CHECK(!p.empty());
  p.add_ge({Rat(1), Rat(0)}, Rat(11));  // x >= 11 against x <= 10
  CHECK(p.empty());

  // A rationally empty sliver: 2x >= 1 and 2x <= 1 is satisfiable (x = 1/2),
  // but adding 3x >= 2 is not.
  Polyhedron q(1);
  q.add_ge({Rat(2)}, Rat(1));
  q.add_ge({Rat(-2)}, Rat(-1));
  CHECK(!q.empty());
  q.add_ge({Rat(3)}, Rat(2));
  CHECK(q.empty());
}

TEST_CASE("farkas_encode certifies valid implications and rejects invalid ones") {
  // Premise: 1 <= x <= 10.
  Polyhedron prem(1);
  prem.add_ge({Rat(1)}, Rat(1));
  prem.add_ge({Rat(-1)}, Rat(-10));

  {
    // Conclusion 2x >= 2 is implied.
    LinSystem sys;
    std::vector<AffineForm> w{AffineForm(Rat(2))};
    AffineForm e(Rat(2));
    farkas_encode(sys, prem, w, e, "ok");
    CHECK(solve(sys).status == Status::Feasible);
  }
  {
    // Conclusion x >= 5 is not implied (x = 1 violates it).
    LinSystem sys;
    std::vector<AffineForm> w{AffineForm(Rat(1))};
    AffineForm e(Rat(5));
    farkas_encode(sys, prem, w, e, "no");
    CHECK(solve(sys).status == Status::Infeasible);
  }
  {
    // Conclusion -x >= -10 (x <= 10) is implied with a pure row multiplier.
    LinSystem sys;
    std::vector<AffineForm> w{AffineForm(Rat(-1))};
    AffineForm e(Rat(-10));
    farkas_encode(sys, prem, w, e, "ub");
    CHECK(solve(sys).status == Status::Feasible);
  }
}

TEST_CASE("farkas_encode solves for unknown conclusion coefficients") {
  // Find a and c with  a*x + c >= 1  on x >= 1 and  a >= 1:
  // encode the conclusion as affine forms in the unknowns.
  LinSystem sys;
  int a = sys.add_var("a");
  int c = sys.add_var("c");
  Polyhedron prem(1);
  prem.add_ge({Rat(1)}, Rat(1));

  std::vector<AffineForm> w(1);
  w[0].lin.assign(static_cast<std::size_t>(c) + 1, Rat(0));
  w[0].lin[static_cast<std::size_t>(a)] = 1;  // w(u) = a
  AffineForm e;
  e.lin.assign(static_cast<std::size_t>(c) + 1, Rat(0));
  e.lin[static_cast<std::size_t>(c)] = -1;  // move c to the left: a*x >= 1 - c
  e.cst = 1;
  farkas_encode(sys, prem, w, e, "syn");

  std::vector<Rat> alo(sys.vars.size(), Rat(0));
  alo[static_cast<std::size_t>(a)] = 1;
  sys.add(alo, Rel::Ge, Rat(1));  // a >= 1

  auto res = solve(sys);
  REQUIRE(res.status == Status::Feasible);
  const Rat av = res.assignment[static_cast<std::size_t>(a)];
  const Rat cv = res.assignment[static_cast<std::size_t>(c)];
  CHECK(av >= 1);
  // Validity at the premise vertex x = 1 (the binding point).
  CHECK(av + cv >= 1);
}

TEST_CASE("farkas_encode refuses premises with no points") {
  Polyhedron prem(1);
  prem.add_ge({Rat(1)}, Rat(3));
  prem.add_ge({Rat(-1)}, Rat(-2));  // 3 <= x <= 2
  LinSystem sys;
  std::vector<AffineForm> w{AffineForm(Rat(1))};
  AffineForm e(Rat(0));
  CHECK_THROWS_AS(farkas_encode(sys, prem, w, e, "void"), EmptyPremise);
}
