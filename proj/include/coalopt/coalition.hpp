#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coalopt {

/// Ordered list of distinct agent (well operator) labels. Agent index i
/// refers to labels()[i] everywhere in the framework.
class AgentSet {
public:
    AgentSet() = default;
    explicit AgentSet(std::vector<std::string> labels);

    /// Convenience: labels "W1".."Wn".
    static AgentSet numbered(int count);

    int count() const { return static_cast<int>(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(int index) const { return labels_.at(index); }

    /// Index of a label; throws ValidationError if unknown.
    int index_of(const std::string& label) const;

private:
    std::vector<std::string> labels_;
};

/// Non-empty set of agent indices, kept sorted ascending.
struct Coalition {
    std::vector<int> members;

    int size() const { return static_cast<int>(members.size()); }
    bool contains(int agent) const;
    bool operator==(const Coalition& other) const { return members == other.members; }

    /// Textual form, e.g. "{W1,W3}".
    std::string to_text(const AgentSet& agents) const;
};

/// Partition of the agent set into disjoint coalitions covering all agents.
/// Coalitions are ordered by their smallest member; members are sorted.
class CoalitionStructure {
public:
    CoalitionStructure() = default;

    /// Builds from arbitrary groups; normalizes order and validates that the
    /// groups partition {0, .., agent_count-1}.
    CoalitionStructure(int agent_count, std::vector<Coalition> groups);

    int agent_count() const { return agent_count_; }
    int coalition_count() const { return static_cast<int>(coalitions_.size()); }
    const std::vector<Coalition>& coalitions() const { return coalitions_; }
    const Coalition& coalition(int index) const { return coalitions_.at(index); }

    /// Index of the coalition containing the given agent.
    int coalition_of(int agent) const;

    bool is_grand() const { return coalitions_.size() == 1; }
    bool is_singletons() const { return static_cast<int>(coalitions_.size()) == agent_count_; }

    /// Restricted-growth string, e.g. "010" for {{W1,W3},{W2}}. Digits are
    /// coalition indices per agent; valid as a key for agent counts <= 10.
    std::string canonical_key() const;

    /// Textual form, e.g. "{W1,W2}|{W3}".
    std::string to_text(const AgentSet& agents) const;

    bool operator==(const CoalitionStructure& other) const {
        return agent_count_ == other.agent_count_ && coalitions_ == other.coalitions_;
    }

private:
    int agent_count_ = 0;
    std::vector<Coalition> coalitions_;
};

/// Keep/drop rules applied to enumerated structures. `deny` drops every
/// structure that contains a listed coalition. A non-empty `allow` list
/// additionally restricts multi-member coalitions to the listed ones;
/// singleton coalitions always pass.
struct StructureFilter {
    std::vector<Coalition> allow;
    std::vector<Coalition> deny;

    bool empty() const { return allow.empty() && deny.empty(); }
    bool admits(const CoalitionStructure& s) const;
};

/// Number of set partitions of n elements (Bell number). Throws
/// ValidationError for n < 0 or n > 25 (beyond 25 the value overflows).
std::uint64_t bell_number(int n);

/// All coalition structures over the agent set, in lexicographic order of
/// their restricted-growth strings (the grand coalition first, singletons
/// last). Throws CapacityError when agents.count() exceeds `max_agents`
/// (default 12, Bell(12) = 4213597 structures).
std::vector<CoalitionStructure> enumerate_structures(const AgentSet& agents,
                                                     int max_agents = 12);

/// Number of distinct non-empty coalitions over n agents: 2^n - 1.
std::uint64_t count_coalitions(int n);

/// Parses either a restricted-growth key ("010") or a textual form
/// ("{W1,W3}|{W2}") into a structure over the given agents.
CoalitionStructure parse_structure(const std::string& text, const AgentSet& agents);

/// Parses a single brace-enclosed coalition like "{W1,W3}".
Coalition parse_coalition(const std::string& text, const AgentSet& agents);

}  // namespace coalopt
