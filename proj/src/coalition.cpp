#include "coalopt/coalition.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "coalopt/errors.hpp"

namespace coalopt {

AgentSet::AgentSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw ValidationError("agent set must contain at least one agent");
    std::set<std::string> seen;
    for (const auto& l : labels_) {
        if (l.empty()) throw ValidationError("agent labels must be non-empty");
        if (l.find_first_of("{},|") != std::string::npos)
            throw ValidationError("agent label '" + l + "' contains a reserved character");
        if (!seen.insert(l).second)
            throw ValidationError("duplicate agent label '" + l + "'");
    }
}

AgentSet AgentSet::numbered(int count) {
    if (count < 1) throw ValidationError("agent count must be at least 1");
    std::vector<std::string> labels;
    labels.reserve(count);
    for (int i = 1; i <= count; ++i) labels.push_back("W" + std::to_string(i));
    return AgentSet(std::move(labels));
}

int AgentSet::index_of(const std::string& label) const {
    for (int i = 0; i < count(); ++i)
        if (labels_[i] == label) return i;
    throw ValidationError("unknown agent label '" + label + "'");
}

bool Coalition::contains(int agent) const {
    return std::binary_search(members.begin(), members.end(), agent);
}

std::string Coalition::to_text(const AgentSet& agents) const {
    std::string out = "{";
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i > 0) out += ",";
        out += agents.label(members[i]);
    }
    out += "}";
    return out;
}

CoalitionStructure::CoalitionStructure(int agent_count, std::vector<Coalition> groups)
    : agent_count_(agent_count), coalitions_(std::move(groups)) {
    if (agent_count_ < 1) throw ValidationError("structure needs at least one agent");
    std::vector<int> owner(agent_count_, -1);
    for (auto& c : coalitions_) {
        if (c.members.empty()) throw ValidationError("empty coalition in structure");
        std::sort(c.members.begin(), c.members.end());
        for (int m : c.members) {
            if (m < 0 || m >= agent_count_)
                throw ValidationError("coalition member index " + std::to_string(m) +
                                      " out of range");
            if (owner[m] != -1)
                throw ValidationError("agent index " + std::to_string(m) +
                                      " appears in more than one coalition");
            owner[m] = 1;
        }
    }
    for (int a = 0; a < agent_count_; ++a)
        if (owner[a] == -1)
            throw ValidationError("agent index " + std::to_string(a) +
                                  " missing from structure");
    std::sort(coalitions_.begin(), coalitions_.end(),
              [](const Coalition& a, const Coalition& b) {
                  return a.members.front() < b.members.front();
              });
}

int CoalitionStructure::coalition_of(int agent) const {
    for (int j = 0; j < coalition_count(); ++j)
        if (coalitions_[j].contains(agent)) return j;
    throw ValidationError("agent index " + std::to_string(agent) + " not in structure");
}

std::string CoalitionStructure::canonical_key() const {
    std::string key;
    for (int a = 0; a < agent_count_; ++a) {
        int j = coalition_of(a);
        if (agent_count_ <= 10) {
            key += static_cast<char>('0' + j);
        } else {
            if (a > 0) key += "-";
            key += std::to_string(j);
        }
    }
    return key;
}

std::string CoalitionStructure::to_text(const AgentSet& agents) const {
    if (agents.count() != agent_count_)
        throw ValidationError("agent set size does not match structure");
    std::string out;
    for (int j = 0; j < coalition_count(); ++j) {
        if (j > 0) out += "|";
        out += coalitions_[j].to_text(agents);
    }
    return out;
}

bool StructureFilter::admits(const CoalitionStructure& s) const {
    for (const auto& c : s.coalitions()) {
        for (const auto& d : deny)
            if (c == d) return false;
        if (!allow.empty() && c.size() >= 2) {
            bool listed = false;
            for (const auto& a : allow)
                if (c == a) { listed = true; break; }
            if (!listed) return false;
        }
    }
    return true;
}

std::uint64_t bell_number(int n) {
    if (n < 0) throw ValidationError("Bell number argument must be non-negative");
    if (n > 25) throw ValidationError("Bell(" + std::to_string(n) + ") overflows 64 bits");
    // Bell triangle: each row starts with the previous row's last entry.
    std::vector<std::uint64_t> row{1};
    for (int i = 1; i <= n; ++i) {
        std::vector<std::uint64_t> next;
        next.reserve(i + 1);
        next.push_back(row.back());
        for (std::size_t k = 0; k < row.size(); ++k)
            next.push_back(next.back() + row[k]);
        row = std::move(next);
    }
    return row.front();
}

namespace {

/// Visits every restricted-growth string over n agents in lexicographic
/// order. rgs[i] is the coalition index of agent i.
void for_each_rgs(int n, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> rgs(n, 0);
    std::function<void(int, int)> rec = [&](int i, int prefix_max) {
        if (i == n) {
            visit(rgs);
            return;
        }
        for (int v = 0; v <= prefix_max + 1; ++v) {
            rgs[i] = v;
            rec(i + 1, std::max(prefix_max, v));
        }
    };
    if (n > 0) {
        rgs[0] = 0;
        rec(1, 0);
    }
}

CoalitionStructure structure_from_rgs(int n, const std::vector<int>& rgs) {
    int groups = 1 + *std::max_element(rgs.begin(), rgs.end());
    std::vector<Coalition> cs(groups);
    for (int a = 0; a < n; ++a) cs[rgs[a]].members.push_back(a);
    return CoalitionStructure(n, std::move(cs));
}

}  // namespace

std::vector<CoalitionStructure> enumerate_structures(const AgentSet& agents,
                                                     int max_agents) {
    const int n = agents.count();
    if (n > max_agents) {
        const std::string count =
            n <= 25 ? std::to_string(bell_number(n)) : "more than 2^64";
        throw CapacityError("enumeration over " + std::to_string(n) +
                            " agents exceeds the cap of " + std::to_string(max_agents) +
                            " (Bell(" + std::to_string(n) + ") = " + count +
                            " structures); restrict the agent set or use a filter");
    }
    std::vector<CoalitionStructure> out;
    for_each_rgs(n, [&](const std::vector<int>& rgs) {
        out.push_back(structure_from_rgs(n, rgs));
    });
    return out;
}

std::uint64_t count_coalitions(int n) {
    if (n < 1 || n > 63)
        throw ValidationError("coalition count defined for 1..63 agents");
    return (std::uint64_t{1} << n) - 1;
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace

CoalitionStructure parse_structure(const std::string& text, const AgentSet& agents) {
    if (text.empty()) throw ValidationError("empty structure text");
    const int n = agents.count();
    const bool digits_only =
        text.find_first_not_of("0123456789") == std::string::npos;
    if (digits_only && n <= 10) {
        if (static_cast<int>(text.size()) != n)
            throw ValidationError("structure key '" + text + "' must have " +
                                  std::to_string(n) + " digits");
        std::vector<int> rgs(n);
        int prefix_max = -1;
        for (int i = 0; i < n; ++i) {
            rgs[i] = text[i] - '0';
            if (rgs[i] > prefix_max + 1)
                throw ValidationError("structure key '" + text +
                                      "' is not a restricted-growth string");
            prefix_max = std::max(prefix_max, rgs[i]);
        }
        if (rgs[0] != 0)
            throw ValidationError("structure key '" + text +
                                  "' is not a restricted-growth string");
        int groups = prefix_max + 1;
        std::vector<Coalition> cs(groups);
        for (int a = 0; a < n; ++a) cs[rgs[a]].members.push_back(a);
        return CoalitionStructure(n, std::move(cs));
    }
    std::vector<Coalition> groups;
    for (const auto& part : split(text, '|'))
        groups.push_back(parse_coalition(part, agents));
    return CoalitionStructure(n, std::move(groups));
}

Coalition parse_coalition(const std::string& text, const AgentSet& agents) {
    if (text.size() < 2 || text.front() != '{' || text.back() != '}')
        throw ValidationError("coalition '" + text + "' must be brace-enclosed");
    Coalition c;
    for (const auto& label : split(text.substr(1, text.size() - 2), ','))
        c.members.push_back(agents.index_of(label));
    if (c.members.empty())
        throw ValidationError("coalition '" + text + "' is empty");
    std::sort(c.members.begin(), c.members.end());
    if (std::adjacent_find(c.members.begin(), c.members.end()) != c.members.end())
        throw ValidationError("coalition '" + text + "' repeats an agent");
    return c;
}

}  // namespace coalopt
