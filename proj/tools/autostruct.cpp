// autostruct: command line driver for the pipeline stages and queries.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "autostruct/autstruct.hpp"
#include "autostruct/error.hpp"
#include "autostruct/pipeline.hpp"
#include "autostruct/query.hpp"

namespace fs = std::filesystem;
using namespace autostruct;

namespace {

  // Resolves a directory (holding one presentation) or an artifact path
  // prefix, with or without an extension, to the prefix.
  fs::path artifact_prefix(std::string const& where) {
    fs::path w(where);
    if (fs::is_directory(w)) {
      std::vector<fs::path> found;
      for (auto const& e : fs::directory_iterator(w)) {
        if (e.path().extension() == ".pres") {
          found.push_back(e.path());
        }
      }
      if (found.size() != 1) {
        throw ParseError(fmt::format("expected one presentation in '{}'", where));
      }
      return found[0].replace_extension();
    }
    static std::vector<std::string> const exts{".pres", ".rules", ".wdiff", ".wa", ".mult",
                                               ".diff", ".minrules", ".log", ".ckpt"};
    for (auto const& e : exts) {
      if (w.extension() == e) {
        return w.replace_extension();
      }
    }
    return w;
  }

  std::string with(fs::path const& prefix, char const* ext) {
    auto p = prefix;
    p += ext;
    return p.string();
  }

  Presentation read_pres(fs::path const& prefix) {
    std::ifstream in(with(prefix, ".pres"));
    if (!in) {
      throw ParseError(fmt::format("cannot read '{}'", with(prefix, ".pres")));
    }
    return read_presentation(in);
  }

  RuleSet read_rules_file(fs::path const& prefix, Alphabet const& a) {
    std::ifstream in(with(prefix, ".rules"));
    if (!in) {
      throw ParseError(fmt::format("cannot read '{}'", with(prefix, ".rules")));
    }
    return read_rules(in, a);
  }

  WordDifferenceMachine read_dm(fs::path const& prefix, Alphabet const& a) {
    auto rs    = read_rules_file(prefix, a);
    auto saved = wd_machine_from_fsa(read_fsa_file(with(prefix, ".wdiff")));
    return build_wd_machine(difference_set(saved), rule_reducer(rs));
  }

  void append_log(fs::path const& prefix, std::string const& line) {
    std::ofstream(with(prefix, ".log"), std::ios::app) << line << '\n';
  }

  struct Options {
    std::string out = ".";
    std::string name;
    std::string tmp;
    std::size_t max_eqns   = 0;
    std::size_t wd_window  = 0;
    std::size_t max_states = 0;
    std::size_t max_iter   = 0;
    std::size_t witnesses  = 0;
    int         verbose    = 0;

    void add_to(CLI::App* c, bool run_flags) {
      c->add_option("--max-states", max_states, "state budget per automaton");
      c->add_option("--tmp", tmp, "directory for temporary files");
      c->add_flag("-v,--verbose", verbose, "echo the log to stderr");
      if (run_flags) {
        c->add_option("--out", out, "output directory");
        c->add_option("--name", name, "artifact base name");
        c->add_option("--max-eqns", max_eqns, "equation budget for completion");
        c->add_option("--wd-window", wd_window,
                      "passes with an unchanged difference count before completion stops");
        c->add_option("--max-iter", max_iter, "cap on correction passes");
        c->add_option("--witnesses", witnesses, "failures repaired per generator and pass");
      }
    }

    RunConfig config(std::string input, std::vector<std::string> argv) const {
      RunConfig cfg;
      cfg.input   = std::move(input);
      cfg.out_dir = out;
      cfg.name    = name;
      if (max_eqns > 0) {
        cfg.synth.kb.max_equations = max_eqns;
      }
      if (wd_window > 0) {
        cfg.synth.kb.stabilization_window = wd_window;
      }
      if (max_states > 0) {
        cfg.synth.build.max_states = max_states;
      }
      if (max_iter > 0) {
        cfg.synth.max_iterations = max_iter;
      }
      if (witnesses > 0) {
        cfg.synth.witnesses = witnesses;
      }
      cfg.temp_dir     = tmp;
      cfg.verbosity    = verbose;
      cfg.command_line = std::move(argv);
      return cfg;
    }

    BuildOptions build() const {
      BuildOptions b;
      if (max_states > 0) {
        b.max_states = max_states;
      }
      b.minimize.temp_dir = tmp;
      return b;
    }
  };

  int stage_kb(std::string const& input, RunConfig const& cfg) {
    Presentation p;
    try {
      p = load_presentation(input);
    } catch (std::invalid_argument const& e) {
      throw ParseError(e.what());
    }
    auto const name   = cfg.name.empty() ? artifact_name(input) : cfg.name;
    fs::create_directories(cfg.out_dir);
    auto const prefix = fs::path(cfg.out_dir) / name;
    std::ofstream(with(prefix, ".log"), std::ios::trunc);
    {
      std::ofstream out(with(prefix, ".pres"));
      write_presentation(out, p);
    }
    KnuthBendix kb(p, cfg.synth.kb);
    kb.on_pass([&](KbPass const& q) {
      auto line = fmt::format("pass={} rules={} eqns={} wdiffs={} wdiffs_inv={}", q.pass,
                              q.rules, q.equations, q.wdiffs, q.wdiffs_inv);
      append_log(prefix, line);
      std::cout << line << '\n';
    });
    auto halt = kb.run();
    append_log(prefix, fmt::format("# kb halt={}", to_string(halt)));
    {
      std::ofstream out(with(prefix, ".rules"));
      write_rules(out, kb.rules());
    }
    auto wd = close_under_inversion(kb.diffs(), kb.rules());
    write_fsa_file(with(prefix, ".wdiff"),
                   build_wd_machine(wd, rule_reducer(kb.rules()), false).fsa,
                   name + ".wdiff");
    std::cout << "halt=" << to_string(halt) << '\n';
    return kExitOk;
  }

  void print_order(Alphabet const& a, OrderResult const& r) {
    switch (r.kind) {
      case OrderResult::Kind::finite:
        std::cout << "finite " << r.order << '\n';
        break;
      case OrderResult::Kind::unknown:
        std::cout << "unknown budget=" << r.budget << '\n';
        break;
      case OrderResult::Kind::infinite: {
        std::cout << "infinite\n";
        auto const& c = *r.certificate;
        std::cout << "certificate base=" << a.print(c.base) << " cycle_start=" << c.cycle_start
                  << " states=";
        for (std::size_t i = 0; i < c.states.size(); ++i) {
          std::cout << (i == 0 ? "" : ",") << c.states[i];
        }
        std::cout << '\n';
        break;
      }
    }
  }

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  CLI::App                 app{"Short-lex automatic structures of finitely presented groups"};
  app.require_subcommand(1);

  Options     opt;
  std::string input, aut, w1, w2;
  std::size_t maxlen = 0;
  bool        csv    = false;

  std::vector<std::string> input_parts;

  auto* c_auto = app.add_subcommand("auto", "run the whole pipeline");
  c_auto->add_option("input", input_parts, "presentation file or `fib <n>`")->required()->expected(1, 2);
  opt.add_to(c_auto, true);

  auto* c_kb = app.add_subcommand("kb", "Knuth-Bendix completion only");
  c_kb->add_option("input", input_parts, "presentation file or `fib <n>`")->required()->expected(1, 2);
  opt.add_to(c_kb, true);

  auto* c_resume = app.add_subcommand("resume", "continue from a checkpoint");
  c_resume->add_option("dir", aut, "run directory or artifact prefix")->required();
  c_resume->add_option("--input", input, "presentation the checkpoint must match");
  opt.add_to(c_resume, true);

  auto* c_wa    = app.add_subcommand("wa", "build <aut>.wa from <aut>.wdiff and <aut>.rules");
  auto* c_mult  = app.add_subcommand("mult", "build <aut>.mult");
  auto* c_check = app.add_subcommand("check", "partial correctness test");
  auto* c_ax    = app.add_subcommand("axioms", "axiom check of <aut>.wa and <aut>.mult");
  for (auto* c : {c_wa, c_mult, c_check, c_ax}) {
    c->add_option("aut", aut, "artifact directory or prefix")->required();
    opt.add_to(c, false);
  }

  auto* c_reduce = app.add_subcommand("reduce", "normal form of a word");
  auto* c_wp     = app.add_subcommand("wp", "decide whether two words are equal");
  auto* c_order  = app.add_subcommand("order", "order of an element");
  auto* c_size   = app.add_subcommand("size", "order of the group");
  auto* c_growth = app.add_subcommand("growth", "number of elements of each length");
  for (auto* c : {c_reduce, c_wp, c_order, c_size, c_growth}) {
    c->add_option("aut", aut, "artifact directory or prefix")->required();
  }
  for (auto* c : {c_reduce, c_wp, c_order}) {
    c->add_option("word", w1)->required();
  }
  c_wp->add_option("other", w2)->required();
  c_growth->add_option("--maxlen", maxlen, "largest length")->required();
  c_growth->add_flag("--csv", csv, "print length,count rows");

  CLI11_PARSE(app, argc, argv);
  for (auto const& s : input_parts) {
    input += (input.empty() ? "" : " ") + s;
  }

  try {
    if (c_auto->parsed()) {
      return run_pipeline(opt.config(input, args));
    }
    if (c_resume->parsed()) {
      return resume(aut, opt.config(input, args));
    }
    if (c_kb->parsed()) {
      return stage_kb(input, opt.config(input, args));
    }

    if (c_wa->parsed() || c_mult->parsed() || c_check->parsed() || c_ax->parsed()) {
      auto const prefix = artifact_prefix(aut);
      auto const name   = prefix.filename().string();
      auto const p      = read_pres(prefix);
      if (c_ax->parsed()) {
        auto W      = read_fsa_file(with(prefix, ".wa"));
        auto M      = read_fsa_file(with(prefix, ".mult"));
        auto report = axiom_report(W, M, p, opt.build().max_states);
        for (auto const& f : report.failures) {
          std::cout << "fail " << f << '\n';
        }
        std::cout << "axioms=" << (report.ok ? "ok" : "fail") << '\n';
        return report.ok ? kExitOk : kExitUnverified;
      }
      auto dm = read_dm(prefix, p.alphabet);
      if (c_wa->parsed()) {
        auto W = build_word_acceptor(dm, opt.build());
        write_fsa_file(with(prefix, ".wa"), W, name + ".wa");
        std::cout << "W=" << W.num_states() << '\n';
        return kExitOk;
      }
      auto W = read_fsa_file(with(prefix, ".wa"));
      if (c_mult->parsed()) {
        auto M = build_multiplier(dm, W, opt.build());
        write_fsa_file(with(prefix, ".mult"), M.fsa, name + ".mult");
        std::cout << "M_raw=" << M.raw_states << " M=" << M.fsa.num_states() << '\n';
        return kExitOk;
      }
      Multiplier M;
      M.fsa       = read_fsa_file(with(prefix, ".mult"));
      auto rs     = read_rules_file(prefix, p.alphabet);
      auto result = partial_correctness_check(W, M, rs, &dm);
      for (auto const& f : result.failures) {
        std::cout << "fail letter="
                  << (f.letter == kIdentityMark ? std::string("1") : p.alphabet.name(f.letter))
                  << " u=" << p.alphabet.print(f.u) << " v=" << p.alphabet.print(f.v)
                  << " new_diffs=" << f.new_diffs.size() << '\n';
      }
      std::cout << "check=" << (result.ok() ? "ok" : "fail") << '\n';
      return result.ok() ? kExitOk : kExitUnverified;
    }

    // queries
    auto const q = load_structure(aut);
    auto const a = q.acceptor.alphabet();
    if (c_reduce->parsed()) {
      std::cout << a.print(reduce_word(q, a.parse(w1))) << '\n';
    } else if (c_wp->parsed()) {
      std::cout << (word_problem(q, a.parse(w1), a.parse(w2)) ? "equal" : "not equal") << '\n';
    } else if (c_order->parsed()) {
      print_order(a, element_order(q, a.parse(w1)));
    } else if (c_size->parsed()) {
      auto n = group_order(q);
      if (auto* f = std::get_if<big_int>(&n)) {
        std::cout << *f << '\n';
      } else {
        std::cout << "infinite\n";
      }
    } else if (c_growth->parsed()) {
      auto g = growth_series(q, maxlen);
      if (csv) {
        std::cout << "length,count\n";
      }
      for (std::size_t n = 0; n < g.size(); ++n) {
        std::cout << n << (csv ? "," : " ") << g[n] << '\n';
      }
    }
    return kExitOk;
  } catch (ParseError const& e) {
    std::cerr << "autostruct: " << e.what() << '\n';
    return kExitParse;
  } catch (AlphabetMismatch const& e) {
    std::cerr << "autostruct: " << e.what() << '\n';
    return kExitParse;
  } catch (NotVerified const& e) {
    std::cerr << "autostruct: " << e.what() << '\n';
    return kExitUnverified;
  } catch (CorruptCheckpoint const& e) {
    std::cerr << "autostruct: " << e.what() << '\n';
    return kExitCorrupt;
  } catch (BudgetExceeded const& e) {
    std::cerr << "autostruct: " << e.what() << '\n';
    return kExitResource;
  } catch (std::bad_alloc const&) {
    std::cerr << "autostruct: out of memory\n";
    return kExitResource;
  } catch (Error const& e) {
    std::cerr << "autostruct: " << e.what() << '\n';
    return kExitResource;
  }
}
