#pragma once

#include "ede/rdf/term.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ede::rdf {

/// Triple selector; an empty position matches any term.
struct TriplePatternSpec {
    std::optional<Term> subject;
    std::optional<Term> predicate;
    std::optional<Term> object;
};

/// In-memory triple set with subject, predicate and object indexes.
///
/// Graph is a plain value type with no internal locking: concurrent const
/// access is safe, mutation requires exclusive access. Servers share
/// immutable snapshots (std::shared_ptr<const Graph>) and swap in a new
/// snapshot on write.
class Graph {
public:
    Graph() = default;

    /// Inserts a triple (no-op if already present). Returns the size afterwards.
    /// Throws ValidationError for a literal subject or non-IRI predicate.
    std::size_t insert(Triple triple);
    void merge(const Graph& other);

    bool contains(const Triple& triple) const { return ids_.count(triple) != 0; }
    std::size_t size() const noexcept { return triples_.size(); }
    bool empty() const noexcept { return triples_.empty(); }

    /// Triples in insertion order.
    const std::vector<Triple>& triples() const noexcept { return triples_; }

    /// Calls `fn(const Triple&)` for each match, scanning the smallest index
    /// among the bound positions.
    template <typename Fn>
    void for_each_match(const TriplePatternSpec& pattern, Fn&& fn) const {
        const std::vector<std::uint32_t>* candidates = nullptr;
        if (!select_candidates(pattern, candidates)) return;
        if (candidates == nullptr) {
            for (const auto& t : triples_) {
                if (matches(t, pattern)) fn(t);
            }
            return;
        }
        for (auto id : *candidates) {
            const auto& t = triples_[id];
            if (matches(t, pattern)) fn(t);
        }
    }

    std::vector<Triple> match(const TriplePatternSpec& pattern) const;

    /// Upper bound on the number of matches: the size of the most selective
    /// index bucket (exact when at most one position is bound).
    std::size_t estimate(const TriplePatternSpec& pattern) const;

    /// Distinct predicates in first-seen order.
    std::vector<Term> predicates() const;
    /// Distinct objects of rdf:type triples in first-seen order.
    std::vector<Term> classes() const;
    std::size_t predicate_count(const Term& predicate) const;

    static bool matches(const Triple& triple, const TriplePatternSpec& pattern);

    /// Set equality.
    friend bool operator==(const Graph& a, const Graph& b);

private:
    using Index = std::unordered_map<Term, std::vector<std::uint32_t>, TermHash>;

    /// False when some bound position has no index entry (no matches possible).
    /// Sets `out` to nullptr when nothing is bound (full scan).
    bool select_candidates(const TriplePatternSpec& pattern,
                           const std::vector<std::uint32_t>*& out) const;

    std::vector<Triple> triples_;
    std::unordered_map<Triple, std::uint32_t, TripleHash> ids_;
    Index by_subject_;
    Index by_predicate_;
    Index by_object_;
};

}  // namespace ede::rdf
