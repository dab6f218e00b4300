// Command-line front end: classifier, scanner, element operations, wreath
// measures, and the executable example library.
//
// Exit status: 0 on success, 1 on domain errors, 2 on usage errors.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "almostlocal/commensurate.hpp"
#include "almostlocal/criteria.hpp"
#include "almostlocal/simplicity.hpp"
#include "almostlocal/word_metric.hpp"

using namespace almostlocal;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw domain_error("cannot write file: " + path);
  out << text;
}

// top-level comma split for --pair F,Fp
std::pair<std::string, std::string> split_pair(const std::string& s) {
  int depth = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == ',' && depth == 0) return {s.substr(0, i), s.substr(i + 1)};
  }
  throw domain_error("--pair expects two descriptors separated by a comma");
}

int cmd_classify(const std::string& f, const std::string& fp, const std::string& fpp, int k) {
  PermGroup F = construct_group(f);
  PermGroup Fp = construct_group(fp);
  std::optional<PermGroup> Fpp;
  if (!fpp.empty()) Fpp = construct_group(fpp);
  ClassifierReport r = classify(F, Fp, Fpp, k);
  std::cout << r.to_text();
  if (!r.standing.is_yes()) {
    std::cerr << "standing assumption fails: " << r.standing.evidence << "\n";
    return 1;
  }
  return 0;
}

int cmd_scan(int degree, const std::string& filter, int k) {
  std::vector<ScanRow> rows = scan(degree, filter, k);
  std::cout << scan_table(rows);
  return 0;
}

int cmd_elem(const std::string& pair, const std::string& fpp, const std::string& input,
             const std::string& op, const std::string& outdir) {
  auto [fs, fps] = split_pair(pair);
  GroupPair P(construct_group(fs), construct_group(fps));
  Portrait g = Portrait::from_text(read_file(input));
  if (!is_in_GFFp(P, g)) {
    for (const auto& [v, s] : g.internal_perms())
      if (!P.Fp().contains(s)) {
        std::cerr << "element not in G(F,F'): local permutation at " << v.to_literal()
                  << " lies outside F'\n";
        return 1;
      }
    for (const auto& [v, s] : g.tail_perms())
      if (!P.F().contains(s)) {
        std::cerr << "element not in G(F,F'): tail at " << v.to_literal()
                  << " lies outside F\n";
        return 1;
      }
  }
  std::filesystem::path dir = outdir.empty() ? "." : outdir;
  std::filesystem::create_directories(dir);

  if (op == "report") {
    SingularityReport r = singularity_report(P, g);
    MembershipReport m = membership_report(P, g);
    std::cout << "in_UF: " << (m.in_UF ? "yes" : "no") << "\n";
    std::cout << "type_preserving: " << (m.type_preserving ? "yes" : "no") << "\n";
    std::cout << "singularities:";
    for (const Vertex& v : r.S) std::cout << " " << v.to_literal();
    std::cout << "\nN: " << r.N << "\n";
    return 0;
  }
  if (op == "decompose") {
    KUDecomposition d = decompose_KU(P, g);
    write_file((dir / "gamma.portrait").string(), d.gamma.to_text());
    std::cout << "gamma: gamma.portrait\nparts: " << d.parts.size() << "\n";
    for (size_t i = 0; i < d.parts.size(); ++i) {
      std::string name = "part" + std::to_string(i + 1) + ".portrait";
      write_file((dir / name).string(), d.parts[i].second.to_text());
      std::cout << "part " << i + 1 << " at " << d.parts[i].first.to_literal() << ": " << name
                << "\n";
    }
    std::cout << "re-multiplication: ok\n";
    return 0;
  }
  if (op == "word") {
    TranslationSystem sys(P);
    GenWord w = word_decompose(P, sys, g);
    std::ostringstream index;
    for (size_t i = 0; i < w.letters.size(); ++i) {
      const GenLetter& l = w.letters[i];
      if (l.kind == GenLetter::Kind::Translation) {
        index << "translation " << l.index << " " << (l.exponent > 0 ? "+1" : "-1") << "\n";
      } else {
        std::string name = "letter" + std::to_string(i + 1) + ".portrait";
        write_file((dir / name).string(), l.element.to_text());
        index << "local " << l.at.to_literal() << " " << name << "\n";
      }
    }
    write_file((dir / "word.txt").string(), index.str());
    std::cout << "letters: " << w.letters.size() << "\nN: " << length_N(P, g)
              << "\nword: word.txt\nre-multiplication: ok\n";
    return 0;
  }
  if (op == "reduce") {
    if (!fpp.empty()) {
      PermGroup Fpp = construct_group(fpp);
      SigmaReduction red = sigma_reduce(P, Fpp, g);
      write_file((dir / "residual.portrait").string(), red.residual.to_text());
      for (size_t i = 0; i < red.steps.size(); ++i)
        write_file((dir / ("gamma" + std::to_string(i + 1) + ".portrait")).string(),
                   red.steps[i].to_text());
      std::cout << "steps: " << red.steps.size() << "\nresidual: residual.portrait\n"
                << "re-multiplication: ok\n";
      return 0;
    }
    SimplicityCertificate c = reduce_simple(P, g);
    write_file((dir / "residual.portrait").string(), c.residual.to_text());
    for (size_t i = 0; i < c.steps.size(); ++i)
      write_file((dir / ("gamma" + std::to_string(i + 1) + ".portrait")).string(),
                 c.steps[i].gamma.to_text());
    std::cout << "steps: " << c.steps.size() << "\nresidual: residual.portrait\n"
              << "re-multiplication: ok\n";
    return 0;
  }
  if (op == "symdiff") {
    std::cout << symdiff_M(P, g) << "\n";
    return 0;
  }
  throw CLI::ValidationError("--op must be one of report|decompose|word|reduce|symdiff");
}

int cmd_wreath(const std::string& d, const std::string& dp, int ell, int level) {
  PermGroup D = construct_group(d);
  PermGroup Dp = construct_group(dp);
  WreathContext ctx(ell, D, Dp);
  MeasureReport m = haar_measures(ctx, level);
  std::cout << "mu_U: " << rational_to_string(m.mu_U) << "\n";
  std::cout << "mu_K: " << rational_to_string(m.mu_K) << "\n";
  std::cout << "diverges: " << (m.diverges ? "yes" : "no") << "\n";
  std::cout << "obstruction: " << (lattice_obstruction(ctx) ? "yes" : "no") << "\n";
  return 0;
}

int cmd_examples(const std::string& which) {
  bool all_pass = true;
  bool matched = false;
  for (const ExampleVector& ex : example_library()) {
    if (which != "all" && ex.name != which) continue;
    matched = true;
    ExampleResult r = ex.run();
    all_pass = all_pass && r.pass;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << ex.name << ": " << r.detail << "\n";
  }
  if (!matched) {
    std::cerr << "no such example vector: " << which << "\n";
    return 1;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact computations for tree automorphism groups with almost-prescribed local action"};
  app.require_subcommand(1);
  uint64_t seed = 12345;
  app.add_option("--seed", seed, "seed for sampled checks");

  auto* classify_cmd = app.add_subcommand("classify", "hypothesis verdicts for a pair (F, F')");
  std::string cf, cfp, cfpp;
  int ck = 4;
  classify_cmd->add_option("--F", cf, "group descriptor for F")->required();
  classify_cmd->add_option("--Fp", cfp, "group descriptor for F'")->required();
  classify_cmd->add_option("--Fpp", cfpp, "intermediate F'' for the index-two theorem");
  classify_cmd->add_option("--k", ck, "bound for the small-action criterion");

  auto* scan_cmd = app.add_subcommand("scan", "classify subgroup pairs of Sym(d) up to conjugacy");
  int sdeg = 4;
  std::string sfilter;
  int sk = 4;
  scan_cmd->add_option("--degree", sdeg, "degree d")->required();
  scan_cmd->add_option("--filter", sfilter, "conjunction of criterion names and 'proper'");
  scan_cmd->add_option("--k", sk, "bound for the small-action criterion");

  auto* elem_cmd = app.add_subcommand("elem", "operations on one element of G(F,F')");
  std::string epair, efpp, ein, eop, eout;
  elem_cmd->add_option("--pair", epair, "F,Fp group descriptors")->required();
  elem_cmd->add_option("--Fpp", efpp, "intermediate F'' (selects the sigma-reduction)");
  elem_cmd->add_option("--in", ein, "portrait file")->required();
  elem_cmd->add_option("--op", eop, "report|decompose|word|reduce|symdiff")->required();
  elem_cmd->add_option("--out", eout, "output directory for factor portraits");

  auto* wreath_cmd = app.add_subcommand("wreath", "iterated wreath product measures");
  std::string wd, wdp;
  int well = 2, wlevel = 0;
  wreath_cmd->add_option("--D", wd, "group descriptor for D")->required();
  wreath_cmd->add_option("--Dp", wdp, "group descriptor for D'")->required();
  wreath_cmd->add_option("--ell", well, "block size |X|")->required();
  wreath_cmd->add_option("--level", wlevel, "level n")->required();

  auto* examples_cmd = app.add_subcommand("examples", "run the example library");
  std::string erun = "all";
  examples_cmd->add_option("--run", erun, "'all' or a vector name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (classify_cmd->parsed()) return cmd_classify(cf, cfp, cfpp, ck);
    if (scan_cmd->parsed()) return cmd_scan(sdeg, sfilter, sk);
    if (elem_cmd->parsed()) return cmd_elem(epair, efpp, ein, eop, eout);
    if (wreath_cmd->parsed()) return cmd_wreath(wd, wdp, well, wlevel);
    if (examples_cmd->parsed()) return cmd_examples(erun);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
