#include "autostruct/minimize.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numeric>
#include <unordered_map>

#include <unistd.h>

#include <fmt/format.h>

#include "autostruct/error.hpp"

namespace autostruct {

  namespace {

    // Refinable partition (Valmari & Lehtinen, "Fast brief practical DFA
    // minimization"). Elements of set s occupy elems[first[s], past[s]); the
    // marked ones are moved to the front of their set.
    struct Partition {
      std::size_t              num_sets = 0;
      std::vector<std::size_t> elems, loc, set_of, first, past, marked, touched;
      std::size_t              num_touched = 0;

      explicit Partition(std::size_t n)
          : elems(n), loc(n), set_of(n, 0), first(n + 1), past(n + 1),
            marked(n + 1, 0), touched(n + 1) {
        num_sets = n > 0 ? 1 : 0;
        std::iota(elems.begin(), elems.end(), 0);
        std::iota(loc.begin(), loc.end(), 0);
        if (n > 0) {
          first[0] = 0;
          past[0]  = n;
        }
      }

      void mark(std::size_t e) {
        auto s = set_of[e];
        auto i = loc[e];
        auto j = first[s] + marked[s];
        elems[i]      = elems[j];
        loc[elems[i]] = i;
        elems[j]      = e;
        loc[e]        = j;
        if (marked[s]++ == 0) {
          touched[num_touched++] = s;
        }
      }

      void split() {
        while (num_touched > 0) {
          auto s = touched[--num_touched];
          auto j = first[s] + marked[s];
          if (j == past[s]) {
            marked[s] = 0;
            continue;
          }
          // the smaller half becomes the new set
          if (marked[s] <= past[s] - j) {
            first[num_sets] = first[s];
            past[num_sets] = first[s] = j;
          } else {
            past[num_sets] = past[s];
            first[num_sets] = past[s] = j;
          }
          for (auto i = first[num_sets]; i < past[num_sets]; ++i) {
            set_of[elems[i]] = num_sets;
          }
          marked[s] = marked[num_sets] = 0;
          ++num_sets;
        }
      }
    };

    // Minimizes a trimmed automaton (every state reachable and co-reachable).
    Fsa minimize_trimmed(Fsa const& f) {
      auto const n = static_cast<std::size_t>(f.num_states());
      Fsa        out(f.alphabet(), f.kind(), 0);
      out.set_label_kind(f.label_kind());
      if (n == 0) {
        return out;
      }
      // transitions, 0-based states
      std::vector<std::size_t> tail, head;
      std::vector<symbol_type> sym;
      for (state_type s = 1; s <= n; ++s) {
        auto const* row = f.row(s);
        for (symbol_type a = 0; a < f.num_symbols(); ++a) {
          if (row[a] != kNoState) {
            tail.push_back(s - 1);
            head.push_back(row[a] - 1);
            sym.push_back(a);
          }
        }
      }
      auto const m = tail.size();

      Partition blocks(n);
      {
        // initial partition by (accepting, label)
        std::map<std::pair<bool, std::uint32_t>, std::vector<std::size_t>> groups;
        for (std::size_t s = 0; s < n; ++s) {
          auto st = static_cast<state_type>(s + 1);
          groups[{f.accepting(st), f.label_id(st)}].push_back(s);
        }
        for (auto const& [k, members] : groups) {
          for (auto s : members) {
            blocks.mark(s);
          }
          blocks.split();
        }
      }

      Partition cords(m);
      if (m > 0) {
        std::stable_sort(cords.elems.begin(), cords.elems.end(),
                         [&](auto x, auto y) { return sym[x] < sym[y]; });
        cords.num_sets = 0;
        auto a         = sym[cords.elems[0]];
        cords.first[0] = 0;
        for (std::size_t i = 0; i < m; ++i) {
          auto t = cords.elems[i];
          if (sym[t] != a) {
            a                            = sym[t];
            cords.past[cords.num_sets++] = i;
            cords.first[cords.num_sets]  = i;
          }
          cords.set_of[t] = cords.num_sets;
          cords.loc[t]    = i;
        }
        cords.past[cords.num_sets++] = m;
      }

      // incoming transitions per state
      std::vector<std::size_t> in_start(n + 1, 0), in_edges(m);
      for (std::size_t t = 0; t < m; ++t) {
        ++in_start[head[t] + 1];
      }
      std::partial_sum(in_start.begin(), in_start.end(), in_start.begin());
      {
        auto fill = in_start;
        for (std::size_t t = 0; t < m; ++t) {
          in_edges[fill[head[t]]++] = t;
        }
      }

      std::size_t b = 1, c = 0;
      while (c < cords.num_sets) {
        for (auto i = cords.first[c]; i < cords.past[c]; ++i) {
          blocks.mark(tail[cords.elems[i]]);
        }
        blocks.split();
        ++c;
        while (b < blocks.num_sets) {
          for (auto i = blocks.first[b]; i < blocks.past[b]; ++i) {
            auto s = blocks.elems[i];
            for (auto j = in_start[s]; j < in_start[s + 1]; ++j) {
              cords.mark(in_edges[j]);
            }
          }
          cords.split();
          ++b;
        }
      }

      // blocks become states; the initial state's block is renumbered to 1
      // by the canonical pass below
      out.resize(static_cast<state_type>(blocks.num_sets));
      for (std::size_t t = 0; t < m; ++t) {
        out.set_target(static_cast<state_type>(blocks.set_of[tail[t]] + 1), sym[t],
                       static_cast<state_type>(blocks.set_of[head[t]] + 1));
      }
      for (std::size_t blk = 0; blk < blocks.num_sets; ++blk) {
        auto rep = static_cast<state_type>(blocks.elems[blocks.first[blk]] + 1);
        auto st  = static_cast<state_type>(blk + 1);
        out.set_accepting(st, f.accepting(rep));
        if (f.has_label(rep)) {
          out.set_label(st, f.label(rep));
        }
      }
      // move the initial block to the front, then renumber breadth first
      auto init = static_cast<state_type>(blocks.set_of[0] + 1);
      if (init != 1) {
        Fsa swapped(out.alphabet(), out.kind(), out.num_states());
        swapped.set_label_kind(out.label_kind());
        auto perm = [&](state_type s) -> state_type {
          return s == init ? 1 : (s == 1 ? init : s);
        };
        for (state_type s = 1; s <= out.num_states(); ++s) {
          for (symbol_type a = 0; a < out.num_symbols(); ++a) {
            auto t = out.target(s, a);
            if (t != kNoState) {
              swapped.set_target(perm(s), a, perm(t));
            }
          }
          swapped.set_accepting(perm(s), out.accepting(s));
          if (out.has_label(s)) {
            swapped.set_label(perm(s), out.label(s));
          }
        }
        out = std::move(swapped);
      }
      return canonical_renumber(out);
    }

    std::string make_temp_path(std::string const& dir) {
      std::string base = dir;
      if (base.empty()) {
        char const* env = std::getenv("AUTOSTRUCT_TMPDIR");
        if (env == nullptr) {
          env = std::getenv("TMPDIR");
        }
        base = env != nullptr ? env : std::filesystem::temp_directory_path().string();
      }
      std::string templ = (std::filesystem::path(base) / "autostruct-table-XXXXXX").string();
      std::vector<char> buf(templ.begin(), templ.end());
      buf.push_back('\0');
      int fd = ::mkstemp(buf.data());
      if (fd < 0) {
        throw BudgetExceeded(
            fmt::format("cannot create temporary table file in '{}'", base));
      }
      ::close(fd);
      return std::string(buf.data());
    }
  }  // namespace

  Fsa minimize(Fsa const& f, MinimizeOptions const& opts) {
    if (f.table_bytes() > opts.external_threshold_bytes && f.num_states() > 0) {
      TableSpool spool(f.alphabet(), f.kind(), opts);
      // ids into f's own label table
      for (state_type s = 1; s <= f.num_states(); ++s) {
        spool.add_state(f.accepting(s), f.label_id(s));
      }
      std::vector<TableSpool::Edge> row;
      for (state_type s = 1; s <= f.num_states(); ++s) {
        row.clear();
        for (symbol_type a = 0; a < f.num_symbols(); ++a) {
          if (f.target(s, a) != kNoState) {
            row.emplace_back(a, f.target(s, a));
          }
        }
        spool.append_row(row);
      }
      return spool.minimize(f.label_kind(), f.label_table());
    }
    return minimize_trimmed(trim(f));
  }

  ////////////////////////////////////////////////////////////////////////
  // TableSpool
  ////////////////////////////////////////////////////////////////////////

  TableSpool::TableSpool(Alphabet alphabet, AlphabetKind kind, MinimizeOptions opts)
      : alphabet_(std::move(alphabet)),
        kind_(kind),
        num_symbols_(Fsa(alphabet_, kind, 0).num_symbols()),
        opts_(std::move(opts)) {}

  TableSpool::~TableSpool() {
    if (out_.is_open()) {
      out_.close();
    }
    if (!path_.empty()) {
      std::error_code ec;
      std::filesystem::remove(path_, ec);
    }
  }

  state_type TableSpool::add_state(bool accepting, std::uint32_t label) {
    accepting_.push_back(accepting ? 1 : 0);
    labels_.push_back(label);
    return num_states();
  }

  void TableSpool::append_row(std::span<Edge const> edges) {
    num_edges_ += edges.size();
    ++rows_written_;
    if (!spilled_) {
      edges_.insert(edges_.end(), edges.begin(), edges.end());
      offsets_.push_back(edges_.size());
      auto dense = (static_cast<std::size_t>(num_states()) + 1) * num_symbols_
                   * sizeof(state_type);
      if (dense > opts_.external_threshold_bytes) {
        spill();
      }
      return;
    }
    auto count = static_cast<std::uint32_t>(edges.size());
    out_.write(reinterpret_cast<char const*>(&count), sizeof(count));
    out_.write(reinterpret_cast<char const*>(edges.data()),
               static_cast<std::streamsize>(edges.size() * sizeof(Edge)));
    if (!out_) {
      throw BudgetExceeded("writing the transition table spool failed");
    }
  }

  void TableSpool::spill() {
    path_ = make_temp_path(opts_.temp_dir);
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) {
      throw BudgetExceeded(fmt::format("cannot open spool file '{}'", path_));
    }
    spilled_ = true;
    for (std::size_t r = 0; r < rows_written_; ++r) {
      auto count = static_cast<std::uint32_t>(offsets_[r + 1] - offsets_[r]);
      out_.write(reinterpret_cast<char const*>(&count), sizeof(count));
      out_.write(reinterpret_cast<char const*>(edges_.data() + offsets_[r]),
                 static_cast<std::streamsize>(count * sizeof(Edge)));
    }
    edges_.clear();
    edges_.shrink_to_fit();
    offsets_.clear();
    offsets_.shrink_to_fit();
  }

  template <typename Visit>
  void TableSpool::for_each_row(Visit&& visit) {
    if (!spilled_) {
      for (std::size_t r = 0; r < rows_written_; ++r) {
        visit(static_cast<state_type>(r + 1),
              std::span<Edge const>(edges_.data() + offsets_[r],
                                    offsets_[r + 1] - offsets_[r]));
      }
      return;
    }
    out_.flush();
    std::ifstream     in(path_, std::ios::binary);
    std::vector<Edge> row;
    for (std::size_t r = 0; r < rows_written_; ++r) {
      std::uint32_t count = 0;
      in.read(reinterpret_cast<char*>(&count), sizeof(count));
      row.resize(count);
      in.read(reinterpret_cast<char*>(row.data()),
              static_cast<std::streamsize>(count * sizeof(Edge)));
      if (!in) {
        throw Error("reading the transition table spool failed");
      }
      visit(static_cast<state_type>(r + 1), std::span<Edge const>(row));
    }
  }

  Fsa TableSpool::to_fsa(LabelKind label_kind,
                         std::vector<word_type> const& label_table) {
    if (rows_written_ != num_states()) {
      throw Error("TableSpool: rows missing");
    }
    Fsa f(alphabet_, kind_, num_states());
    f.set_label_kind(label_kind);
    for (state_type s = 1; s <= num_states(); ++s) {
      f.set_accepting(s, accepting_[s] != 0);
      if (labels_[s] != 0) {
        f.set_label(s, label_table.at(labels_[s]));
      }
    }
    for_each_row([&](state_type s, std::span<Edge const> row) {
      for (auto [a, t] : row) {
        f.set_target(s, a, t);
      }
    });
    return f;
  }

  Fsa TableSpool::minimize(LabelKind label_kind,
                           std::vector<word_type> const& label_table) {
    if (!spilled_) {
      return autostruct::minimize(to_fsa(label_kind, label_table), opts_);
    }
    return minimize_streamed(label_kind, label_table);
  }

  // Moore-style refinement: each round streams every row once and assigns
  // new classes by signature (class, (symbol, target class)...). The
  // implicit sink is element 0; its class collects every dead state.
  Fsa TableSpool::minimize_streamed(LabelKind label_kind,
                                    std::vector<word_type> const& label_table) {
    if (rows_written_ != num_states()) {
      throw Error("TableSpool: rows missing");
    }
    auto const                 n = static_cast<std::size_t>(num_states());
    std::vector<std::uint32_t> cls(n + 1, 0), next(n + 1, 0);
    std::size_t                num_classes = 0;
    {
      std::map<std::pair<std::uint8_t, std::uint32_t>, std::uint32_t> ids;
      ids[{0, 0}] = 0;
      for (std::size_t s = 1; s <= n; ++s) {
        auto [it, fresh] = ids.emplace(std::make_pair(accepting_[s], labels_[s]),
                                       static_cast<std::uint32_t>(ids.size()));
        cls[s] = it->second;
      }
      num_classes = ids.size();
    }

    std::vector<std::uint32_t> sig;
    auto make_sig = [&](std::uint32_t own, std::span<Edge const> row) {
      sig.clear();
      sig.push_back(own);
      for (auto [a, t] : row) {
        if (cls[t] != cls[0]) {
          sig.push_back(a);
          sig.push_back(cls[t]);
        }
      }
    };
    auto hash_sig = [&]() {
      std::uint64_t h = 1469598103934665603ULL;
      for (auto x : sig) {
        h ^= x;
        h *= 1099511628211ULL;
      }
      return h;
    };

    for (;;) {
      std::vector<std::uint32_t>                                   arena;
      std::vector<std::pair<std::size_t, std::size_t>>             where;
      std::unordered_multimap<std::uint64_t, std::uint32_t>        by_hash;
      auto classify = [&]() -> std::uint32_t {
        auto h     = hash_sig();
        auto range = by_hash.equal_range(h);
        for (auto it = range.first; it != range.second; ++it) {
          auto [off, len] = where[it->second];
          if (len == sig.size()
              && std::equal(sig.begin(), sig.end(), arena.begin() + off)) {
            return it->second;
          }
        }
        auto id = static_cast<std::uint32_t>(where.size());
        where.emplace_back(arena.size(), sig.size());
        arena.insert(arena.end(), sig.begin(), sig.end());
        by_hash.emplace(h, id);
        return id;
      };
      make_sig(cls[0], {});
      next[0] = classify();  // always 0
      for_each_row([&](state_type s, std::span<Edge const> row) {
        make_sig(cls[s], row);
        next[s] = classify();
      });
      auto refined = where.size();
      cls.swap(next);
      if (refined == num_classes) {
        break;
      }
      num_classes = refined;
    }

    Fsa out(alphabet_, kind_, 0);
    out.set_label_kind(label_kind);
    if (n == 0 || cls[1] == cls[0]) {
      return out;
    }
    // live classes become states 1..k (sink class 0 is dropped)
    out.resize(static_cast<state_type>(num_classes - 1));
    std::vector<std::uint8_t> done(num_classes, 0);
    for_each_row([&](state_type s, std::span<Edge const> row) {
      auto c = cls[s];
      if (c == cls[0] || done[c]) {
        return;
      }
      done[c] = 1;
      out.set_accepting(c, accepting_[s] != 0);
      if (labels_[s] != 0) {
        out.set_label(c, label_table.at(labels_[s]));
      }
      for (auto [a, t] : row) {
        if (cls[t] != cls[0]) {
          out.set_target(c, a, cls[t]);
        }
      }
    });
    // class ids follow first appearance, so the sink is 0 and the initial
    // state's class is 1
    return canonical_renumber(out);
  }

}  // namespace autostruct
