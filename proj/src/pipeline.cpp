#include "autostruct/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include <boost/crc.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "autostruct/error.hpp"

namespace autostruct {

  namespace fs = std::filesystem;
  using json   = nlohmann::json;

  namespace {
    constexpr char const* kCheckpointFormat = "autostruct-checkpoint";
    constexpr int         kCheckpointVersion = 1;

    std::string slurp(fs::path const& p) {
      std::ifstream in(p, std::ios::binary);
      if (!in) {
        throw CorruptCheckpoint(fmt::format("cannot read '{}'", p.string()));
      }
      return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

    std::string crc_hex(std::string const& bytes) {
      boost::crc_32_type crc;
      crc.process_bytes(bytes.data(), bytes.size());
      return fmt::format("{:08x}", crc.checksum());
    }

    // Exclusive advisory lock held for the lifetime of the object.
    class FileLock {
     public:
      explicit FileLock(fs::path p) : path_(std::move(p)) {
        fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0 || ::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
          if (fd_ >= 0) {
            ::close(fd_);
          }
          throw BudgetExceeded(fmt::format("'{}' is locked by another run", path_.string()));
        }
      }
      ~FileLock() {
        std::error_code ec;
        fs::remove(path_, ec);
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
      }
      FileLock(FileLock const&)            = delete;
      FileLock& operator=(FileLock const&) = delete;

     private:
      fs::path path_;
      int      fd_ = -1;
    };

    // Private temporary directory, removed with its contents at the end.
    class TempDir {
     public:
      explicit TempDir(std::string base) {
        if (base.empty()) {
          if (auto const* e = std::getenv("AUTOSTRUCT_TMPDIR"); e != nullptr && *e != '\0') {
            base = e;
          } else {
            base = fs::temp_directory_path().string();
          }
        }
        fs::create_directories(base);
        std::string tmpl = (fs::path(base) / "autostruct.XXXXXX").string();
        if (::mkdtemp(tmpl.data()) == nullptr) {
          throw BudgetExceeded(fmt::format("cannot create a temporary directory in '{}'", base));
        }
        path_ = tmpl;
        lock_.emplace(path_ / "lock");
      }
      ~TempDir() {
        lock_.reset();
        std::error_code ec;
        fs::remove_all(path_, ec);
      }
      TempDir(TempDir const&)            = delete;
      TempDir& operator=(TempDir const&) = delete;

      fs::path const& path() const noexcept {
        return path_;
      }

     private:
      fs::path                path_;
      std::optional<FileLock> lock_;
    };

    json pass_json(PassRecord const& r) {
      return {{"pass", r.pass}, {"wdiffs", r.wdiffs}, {"W", r.W},
              {"M_raw", r.M_raw}, {"M", r.M}, {"check", r.check_ok}};
    }

    PassRecord pass_from_json(json const& j) {
      return {j.at("pass").get<std::size_t>(), j.at("wdiffs").get<std::size_t>(),
              j.at("W").get<std::size_t>(), j.at("M_raw").get<std::size_t>(),
              j.at("M").get<std::size_t>(), j.at("check").get<bool>()};
    }

    HaltReason halt_from_string(std::string const& s) {
      if (s == "confluent") {
        return HaltReason::confluent;
      }
      if (s == "stabilized") {
        return HaltReason::stabilized;
      }
      return HaltReason::budget;
    }

    class Run {
     public:
      Run(fs::path dir, std::string name, RunConfig const& cfg)
          : dir_(std::move(dir)), name_(std::move(name)), cfg_(cfg) {}

      fs::path path(std::string const& ext) const {
        return dir_ / (name_ + ext);
      }

      std::string file(std::string const& ext) const {
        return name_ + ext;
      }

      void open_log(bool append) {
        log_.open(path(".log"), append ? std::ios::app : std::ios::trunc);
        if (!log_) {
          throw BudgetExceeded(fmt::format("cannot write '{}'", path(".log").string()));
        }
      }

      void line(std::string const& s) {
        log_ << s << '\n';
        log_.flush();
        if (cfg_.verbosity > 0) {
          std::cerr << s << '\n';
        }
      }

      template <typename Writer>
      void write(std::string const& ext, Writer&& w) {
        auto final = path(ext);
        auto tmp   = final;
        tmp += ".tmp";
        {
          std::ofstream out(tmp, std::ios::trunc);
          if (!out) {
            throw BudgetExceeded(fmt::format("cannot write '{}'", tmp.string()));
          }
          w(out);
          if (!out) {
            throw BudgetExceeded(fmt::format("writing '{}' failed", tmp.string()));
          }
        }
        fs::rename(tmp, final);
      }

      void write_fsa_artifact(std::string const& ext, Fsa const& f) {
        write(ext, [&](std::ostream& out) { write_fsa(out, f, file(ext)); });
      }

      void write_state(AutomaticStructure const& s) {
        write(".rules", [&](std::ostream& out) { write_rules(out, s.rules); });
        write_fsa_artifact(".wdiff", build_wd_machine(s.diffs, rule_reducer(s.rules), false).fsa);
      }

      void checkpoint(std::string const&              stage,
                      AutomaticStructure const&       s,
                      std::vector<std::string> const& exts) {
        json files = json::object();
        for (auto const& e : exts) {
          files[file(e)] = file_crc(path(e));
        }
        json passes = json::array();
        for (auto const& r : s.passes) {
          passes.push_back(pass_json(r));
        }
        json j = {{"format", kCheckpointFormat},
                  {"version", kCheckpointVersion},
                  {"name", name_},
                  {"presentation_hash", file_crc(path(".pres"))},
                  {"stage", stage},
                  {"pass", s.passes.size() + (stage == "done" ? 0 : 1)},
                  {"kb_halt", to_string(s.kb_halt)},
                  {"verified", s.verified},
                  {"passes", passes},
                  {"files", files}};
        write(".ckpt", [&](std::ostream& out) { out << j.dump(2) << '\n'; });
      }

      RunConfig const& config() const noexcept {
        return cfg_;
      }

     private:
      fs::path         dir_;
      std::string      name_;
      RunConfig const& cfg_;
      std::ofstream    log_;
    };

    void log_header(Run& run, RunConfig const& cfg) {
      std::string cmd;
      for (auto const& a : cfg.command_line) {
        cmd += (cmd.empty() ? "" : " ") + a;
      }
      auto const& k = cfg.synth.kb;
      run.line("# autostruct " + cmd);
      run.line("# input=" + cfg.input);
      run.line(fmt::format("# kb max_equations={} max_word_len={} max_word_len_cap={} "
                           "stabilization_window={} tidy_interval={} memory_budget={}",
                           k.max_equations, k.max_word_len, k.max_word_len_cap,
                           k.stabilization_window, k.tidy_interval, k.memory_budget));
      run.line(fmt::format("# max_iterations={} witnesses={} max_states={} "
                           "external_threshold_bytes={}",
                           cfg.synth.max_iterations, cfg.synth.witnesses, cfg.synth.build.max_states,
                           cfg.synth.build.minimize.external_threshold_bytes));
    }

    int execute(Run& run, Presentation const& p, std::optional<AutomaticStructure> start) {
      auto const& cfg = run.config();
      TempDir     tmp(cfg.temp_dir);
      auto        scfg                    = cfg.synth;
      scfg.build.minimize.temp_dir        = tmp.path().string();
      scfg.on_kb_pass = [&](KbPass const& q) {
        run.line(fmt::format("pass={} rules={} eqns={} wdiffs={} wdiffs_inv={}", q.pass,
                             q.rules, q.equations, q.wdiffs, q.wdiffs_inv));
      };
      scfg.on_pass_start = [&](AutomaticStructure const& s) {
        run.write_state(s);
        run.checkpoint("pass", s, {".pres", ".rules", ".wdiff"});
      };
      scfg.on_pass = [&](PassRecord const& r) {
        run.line(fmt::format("pass={} wdiffs={} W={} M_raw={} M={} check={}", r.pass, r.wdiffs,
                             r.W, r.M_raw, r.M, r.check_ok ? "ok" : "fail"));
      };
      scfg.log = [&](std::string const& s) { run.line("# " + s); };

      try {
        auto s = start ? synthesize_from(std::move(*start), scfg) : synthesize(p, scfg);
        run.write_state(s);
        run.write_fsa_artifact(".wa", s.acceptor);
        run.write_fsa_artifact(".mult", s.multiplier.fsa);
        std::vector<std::string> files{".pres", ".rules", ".wdiff", ".wa", ".mult", ".diff"};
        if (s.verified) {
          auto mr = minimal_rule_acceptor(s);
          auto q  = query_structure(s, &mr);
          run.write_fsa_artifact(".minrules", mr.rules);
          run.write_fsa_artifact(".diff", q.dm.fsa);
          run.line(fmt::format("# minimal rules: states={} wdiffs={}", mr.rules.num_states(),
                               mr.diffs.size()));
          files.push_back(".minrules");
        } else {
          std::error_code ec;
          fs::remove(run.path(".minrules"), ec);
          run.write_fsa_artifact(".diff", build_wd_machine(s.diffs, rule_reducer(s.rules)).fsa);
        }
        run.line(fmt::format("verified={}", s.verified ? "true" : "false"));
        run.checkpoint("done", s, files);
        return s.verified ? kExitOk : kExitUnverified;
      } catch (BudgetExceeded const& e) {
        run.line(fmt::format("# resource: {}", e.what()));
        std::cerr << "autostruct: " << e.what() << '\n';
        return kExitResource;
      } catch (std::bad_alloc const&) {
        run.line("# resource: out of memory");
        std::cerr << "autostruct: out of memory\n";
        return kExitResource;
      }
    }

    json read_checkpoint(fs::path const& ck) {
      json j;
      try {
        j = json::parse(slurp(ck));
      } catch (json::exception const& e) {
        throw CorruptCheckpoint(fmt::format("'{}' is not a checkpoint: {}", ck.string(), e.what()));
      }
      try {
        if (j.at("format") != kCheckpointFormat || j.at("version") != kCheckpointVersion) {
          throw CorruptCheckpoint(fmt::format("'{}' has an unknown format", ck.string()));
        }
        auto const dir = ck.parent_path();
        for (auto const& [f, crc] : j.at("files").items()) {
          if (!fs::exists(dir / f)) {
            throw CorruptCheckpoint(fmt::format("checkpoint file '{}' is missing", f));
          }
          if (file_crc(dir / f) != crc.get<std::string>()) {
            throw CorruptCheckpoint(fmt::format("checkpoint file '{}' was modified", f));
          }
        }
        auto const pres = dir / (j.at("name").get<std::string>() + ".pres");
        if (file_crc(pres) != j.at("presentation_hash").get<std::string>()) {
          throw CorruptCheckpoint("presentation hash mismatch");
        }
      } catch (json::exception const& e) {
        throw CorruptCheckpoint(fmt::format("'{}' is incomplete: {}", ck.string(), e.what()));
      }
      return j;
    }

    std::string presentation_text(Presentation const& p) {
      std::ostringstream out;
      write_presentation(out, p);
      return out.str();
    }
  }  // namespace

  std::string file_crc(fs::path const& p) {
    return crc_hex(slurp(p));
  }

  std::string artifact_name(std::string const& input) {
    std::istringstream in(input);
    std::string        head, n, rest;
    if (in >> head >> n && !(in >> rest) && head == "fib"
        && n.find_first_not_of("0123456789") == std::string::npos) {
      return "fib" + n;
    }
    auto stem = fs::path(input).stem().string();
    return stem.empty() ? "group" : stem;
  }

  int run_pipeline(RunConfig const& cfg) {
    Presentation p;
    try {
      p = load_presentation(cfg.input);
    } catch (ParseError const& e) {
      std::cerr << "autostruct: " << e.what() << '\n';
      return kExitParse;
    } catch (std::invalid_argument const& e) {
      std::cerr << "autostruct: " << e.what() << '\n';
      return kExitParse;
    }
    auto const name = cfg.name.empty() ? artifact_name(cfg.input) : cfg.name;
    try {
      fs::create_directories(cfg.out_dir);
      FileLock lock(fs::path(cfg.out_dir) / (name + ".lock"));
      Run      run(cfg.out_dir, name, cfg);
      run.open_log(false);
      log_header(run, cfg);
      run.write(".pres", [&](std::ostream& out) { write_presentation(out, p); });
      return execute(run, p, std::nullopt);
    } catch (BudgetExceeded const& e) {
      std::cerr << "autostruct: " << e.what() << '\n';
      return kExitResource;
    } catch (fs::filesystem_error const& e) {
      std::cerr << "autostruct: " << e.what() << '\n';
      return kExitResource;
    }
  }

  fs::path find_checkpoint(std::string const& where) {
    fs::path w(where);
    if (fs::is_directory(w)) {
      std::vector<fs::path> found;
      for (auto const& e : fs::directory_iterator(w)) {
        if (e.path().extension() == ".ckpt") {
          found.push_back(e.path());
        }
      }
      if (found.size() != 1) {
        throw CorruptCheckpoint(fmt::format("expected one checkpoint in '{}', found {}", where,
                                            found.size()));
      }
      return found[0];
    }
    if (w.extension() == ".ckpt" && fs::exists(w)) {
      return w;
    }
    auto ck = w;
    ck += ".ckpt";
    if (fs::exists(ck)) {
      return ck;
    }
    throw CorruptCheckpoint(fmt::format("no checkpoint at '{}'", where));
  }

  int resume(std::string const& where, RunConfig const& cfg) {
    fs::path ck;
    json     j;
    try {
      ck = find_checkpoint(where);
      j  = read_checkpoint(ck);
    } catch (CorruptCheckpoint const& e) {
      std::cerr << "autostruct: " << e.what() << '\n';
      return kExitCorrupt;
    }
    auto const dir  = ck.parent_path();
    auto const name = j.at("name").get<std::string>();
    Presentation p;
    try {
      std::ifstream in(dir / (name + ".pres"));
      p = read_presentation(in);
      if (!cfg.input.empty()
          && presentation_text(load_presentation(cfg.input)) != presentation_text(p)) {
        std::cerr << "autostruct: the checkpoint belongs to a different presentation\n";
        return kExitCorrupt;
      }
    } catch (ParseError const& e) {
      std::cerr << "autostruct: " << e.what() << '\n';
      return kExitCorrupt;
    }
    if (j.at("stage") == "done") {
      return j.at("verified").get<bool>() ? kExitOk : kExitUnverified;
    }

    AutomaticStructure s;
    try {
      s.presentation = p;
      std::ifstream rin(dir / (name + ".rules"));
      s.rules   = read_rules(rin, p.alphabet);
      s.diffs   = difference_set(wd_machine_from_fsa(read_fsa_file((dir / (name + ".wdiff")).string())));
      s.kb_halt = halt_from_string(j.at("kb_halt").get<std::string>());
      for (auto const& r : j.at("passes")) {
        s.passes.push_back(pass_from_json(r));
      }
    } catch (Error const& e) {
      std::cerr << "autostruct: " << e.what() << '\n';
      return kExitCorrupt;
    } catch (json::exception const& e) {
      std::cerr << "autostruct: " << e.what() << '\n';
      return kExitCorrupt;
    }

    auto rc = cfg;
    rc.out_dir = dir.string();
    rc.input   = cfg.input.empty() ? "(checkpoint)" : cfg.input;
    try {
      FileLock lock(dir / (name + ".lock"));
      Run      run(dir, name, rc);
      run.open_log(true);
      run.line(fmt::format("# resumed at pass {}", j.at("pass").get<std::size_t>()));
      return execute(run, p, std::move(s));
    } catch (BudgetExceeded const& e) {
      std::cerr << "autostruct: " << e.what() << '\n';
      return kExitResource;
    }
  }

  QueryStructure load_structure(std::string const& where) {
    auto       ck   = find_checkpoint(where);
    auto       j    = read_checkpoint(ck);
    auto const dir  = ck.parent_path();
    auto const name = j.at("name").get<std::string>();
    if (j.at("stage") != "done") {
      throw NotVerified("the run has not finished");
    }
    QueryStructure q;
    try {
      q.acceptor = read_fsa_file((dir / (name + ".wa")).string());
      q.dm       = wd_machine_from_fsa(read_fsa_file((dir / (name + ".diff")).string()));
    } catch (ParseError const& e) {
      throw CorruptCheckpoint(e.what());
    }
    q.verified = j.at("verified").get<bool>();
    return q;
  }

}  // namespace autostruct
