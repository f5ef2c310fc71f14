#include <string>

#include "fman/model.hpp"

namespace fman {

namespace {

Expr pe(const std::string& s) { return parse_expression(s); }

FModel twocomponent() {
  FModel m;
  m.name = "twocomponent";
  m.coords = {"r1", "r2"};
  m.set_c(0, 0, 0, pe("1"));
  m.set_c(1, 1, 1, pe("1"));
  m.e = {pe("1"), pe("1")};
  m.fields["X"] = {pe("1 - exp(-r2)"), pe("1")};
  // the commuting flow with axis data (s, 1+s)
  m.fields["w"] = {pe("r2 + r1*exp(-r2)"), pe("1 + r2")};
  // invariant diagonal metric solving the Hamiltonian compatibility system
  m.metric = {{pe("exp(2*r2)"), Expr()}, {Expr(), pe("exp(2*r2)")}};
  // flux-closed density pair with independent differentials
  m.densities["h1"] = pe("r1*exp(r2)");
  m.densities["h2"] = pe("r2");
  m.data_series["phi1"] = UniSeries({0.0, 1.0});
  m.data_series["phi2"] = UniSeries({1.0, 1.0});
  m.base_point = {0.0, 0.0};
  return m;
}

FModel nonregular2d() {
  FModel m;
  m.name = "nonregular2d";
  m.coords = {"t", "s"};
  m.set_c(0, 0, 0, pe("1"));
  m.set_c(1, 0, 1, pe("1"));
  m.set_c(1, 1, 0, pe("1"));
  m.set_c(1, 1, 1, pe("s"));
  m.e = {pe("1"), pe("0")};
  m.fields["X"] = {pe("0"), pe("1")};
  m.base_point = {0.0, 0.0};
  return m;
}

FModel onedim() {
  FModel m;
  m.name = "onedim";
  m.coords = {"u"};
  m.set_c(0, 0, 0, pe("1"));
  m.e = {pe("1")};
  m.fields["X"] = {pe("u")};
  m.base_point = {0.0};
  return m;
}

FModel dh_builtin(const std::string& spec) {
  std::vector<int> blocks;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t comma = spec.find(',', pos);
    std::string tok = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      blocks.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw Error(Errc::unknown_name, "bad block size '" + tok + "' in dh-" + spec);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (blocks.empty()) throw Error(Errc::unknown_name, "empty block list in dh-" + spec);

  // Deterministic cyclic field: block leads are pairwise distinct at the
  // origin and the second component of every block is 1 there.
  std::vector<Expr> X;
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    std::string blk = std::to_string(a + 1);
    for (int i = 1; i <= blocks[a]; ++i) {
      std::string u = "u" + blk + "_" + std::to_string(i);
      if (i == 1)
        X.push_back(pe(std::to_string(a) + " + " + u));
      else if (i == 2)
        X.push_back(pe("1 + " + u + " + u" + blk + "_1^2"));
      else
        X.push_back(pe(u));
    }
  }
  FModel m = make_dh_model(blocks, std::move(X));
  m.name = "dh-" + spec;
  return m;
}

}  // namespace

FModel builtin_example(const std::string& bname) {
  FModel m;
  if (bname == "twocomponent")
    m = twocomponent();
  else if (bname == "nonregular2d")
    m = nonregular2d();
  else if (bname == "onedim")
    m = onedim();
  else if (bname.rfind("dh-", 0) == 0)
    m = dh_builtin(bname.substr(3));
  else
    throw Error(Errc::unknown_name, "unknown builtin example '" + bname + "'");
  m.validate();
  return m;
}

std::vector<std::string> builtin_names() { return {"twocomponent", "nonregular2d", "onedim", "dh-2,1", "dh-3"}; }

}  // namespace fman
