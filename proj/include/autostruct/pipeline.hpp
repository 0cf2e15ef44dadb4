#pragma once

// The end-to-end driver: artifacts, run log, checkpoints and resumption.

#include <filesystem>
#include <string>
#include <vector>

#include "autostruct/autstruct.hpp"
#include "autostruct/query.hpp"

namespace autostruct {

  enum ExitCode : int {
    kExitOk         = 0,
    kExitUsage      = 1,
    kExitParse      = 2,
    kExitResource   = 3,
    kExitUnverified = 4,
    kExitCorrupt    = 5,
  };

  struct RunConfig {
    //! `fib <n>` or a presentation file.
    std::string input;
    std::string out_dir = ".";
    //! Artifact base name; derived from the input when empty.
    std::string     name;
    SynthesisConfig synth;
    //! Directory for temporary tables; empty means $AUTOSTRUCT_TMPDIR, then
    //! the system default.
    std::string temp_dir;
    int         verbosity = 0;
    //! Command line as given, echoed into the log header.
    std::vector<std::string> command_line;
  };

  //! Name used for artifacts of \p input: `fib5` for `fib 5`, otherwise the
  //! file stem.
  std::string artifact_name(std::string const& input);

  //! Runs completion, passes and axiom checking, writing
  //! `<name>.{pres,rules,wdiff,wa,mult,diff,minrules,log,ckpt}` into the
  //! output directory. Returns an ExitCode.
  int run_pipeline(RunConfig const& cfg);

  //! Continues from the checkpoint in \p where (a directory holding one
  //! checkpoint, or an artifact path prefix). When cfg.input is set its
  //! presentation must match the checkpoint.
  int resume(std::string const& where, RunConfig const& cfg);

  //! Loads the acceptor and difference machine written by run_pipeline,
  //! validating the checkpoint. Throws CorruptCheckpoint.
  QueryStructure load_structure(std::string const& where);

  //! Resolves a directory or prefix to the checkpoint path.
  std::filesystem::path find_checkpoint(std::string const& where);

  //! Hex CRC-32 of a file's bytes.
  std::string file_crc(std::filesystem::path const& p);

}  // namespace autostruct
