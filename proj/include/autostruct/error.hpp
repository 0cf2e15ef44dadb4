#pragma once

#include <stdexcept>
#include <string>

namespace autostruct {

  //! Base class of every exception thrown by the library.
  class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
  };

  //! Malformed presentation, word, automaton or rules text.
  class ParseError : public Error {
   public:
    using Error::Error;
  };

  //! Operands built over different alphabets or alphabet kinds.
  class AlphabetMismatch : public Error {
   public:
    using Error::Error;
  };

  //! A state, equation or memory budget was exhausted. This signals a
  //! resource limit, not bad input.
  class BudgetExceeded : public Error {
   public:
    using Error::Error;
  };

  //! The operation requires a verified automatic structure.
  class NotVerified : public Error {
   public:
    using Error::Error;
  };

  //! Checkpoint files are missing, modified, or belong to another input.
  class CorruptCheckpoint : public Error {
   public:
    using Error::Error;
  };

}  // namespace autostruct
