#pragma once

// Transition tables too large to hold densely in memory are appended row by
// row to a TableSpool, which moves them to a temporary file once their
// estimated dense size passes a threshold. Minimization of a spilled table
// reads it sequentially, one pass per refinement round.

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "autostruct/fsa.hpp"

namespace autostruct {

  class TableSpool {
   public:
    using Edge = std::pair<symbol_type, state_type>;

    TableSpool(Alphabet alphabet, AlphabetKind kind, MinimizeOptions opts = {});
    ~TableSpool();

    TableSpool(TableSpool const&)            = delete;
    TableSpool& operator=(TableSpool const&) = delete;

    //! Declares a new state; returns its id (1, 2, ...).
    state_type add_state(bool accepting, std::uint32_t label = 0);

    //! Appends the outgoing edges of the next state whose row has not been
    //! written; rows must be written in state order. Edges must be sorted by
    //! symbol.
    void append_row(std::span<Edge const> edges);

    state_type num_states() const noexcept {
      return static_cast<state_type>(accepting_.size() - 1);
    }

    std::size_t num_rows() const noexcept {
      return rows_written_;
    }

    bool spilled() const noexcept {
      return spilled_;
    }

    std::size_t num_transitions() const noexcept {
      return num_edges_;
    }

    //! Minimal automaton of the spooled table. \p label_table maps the label
    //! ids passed to add_state to label words; labels are refined as in
    //! minimize().
    Fsa minimize(LabelKind label_kind, std::vector<word_type> const& label_table);

    //! The spooled table as an ordinary automaton (not minimized).
    Fsa to_fsa(LabelKind label_kind, std::vector<word_type> const& label_table);

   private:
    void spill();
    Fsa  minimize_streamed(LabelKind label_kind,
                           std::vector<word_type> const& label_table);

    template <typename Visit>
    void for_each_row(Visit&& visit);

    Alphabet                   alphabet_;
    AlphabetKind               kind_;
    std::size_t                num_symbols_;
    MinimizeOptions            opts_;
    std::vector<std::uint8_t>  accepting_{0};
    std::vector<std::uint32_t> labels_{0};
    std::vector<std::size_t>   offsets_{0};  // in-memory rows
    std::vector<Edge>          edges_;
    std::size_t                rows_written_ = 0;
    std::size_t                num_edges_    = 0;
    bool                       spilled_      = false;
    std::string                path_;
    std::ofstream              out_;
  };

}  // namespace autostruct
