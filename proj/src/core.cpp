#include "gea/core.hpp"

#include <algorithm>
#include <numeric>

#include "gea/errors.hpp"

namespace gea {

namespace {

std::string id_text(AgentId id) { return std::to_string(id.value); }

}  // namespace

TaskSuccessVector::TaskSuccessVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) {
        if (b > 1) throw InvalidArgument("task-success vector entries must be 0 or 1");
    }
}

TaskSuccessVector TaskSuccessVector::from_string(std::string_view bits) {
    std::vector<std::uint8_t> out;
    out.reserve(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw InvalidArgument("task-success vector must contain only '0' and '1'");
        }
        out.push_back(c == '1' ? 1 : 0);
    }
    return TaskSuccessVector(std::move(out));
}

std::string TaskSuccessVector::to_string() const {
    std::string out;
    out.reserve(bits_.size());
    for (auto b : bits_) out.push_back(b ? '1' : '0');
    return out;
}

std::size_t TaskSuccessVector::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::size_t TaskSuccessVector::dot(const TaskSuccessVector& other) const {
    if (other.size() != size()) {
        throw DimensionMismatch("task-success vectors differ in dimension: " +
                                std::to_string(size()) + " vs " + std::to_string(other.size()));
    }
    std::size_t total = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) total += bits_[i] & other.bits_[i];
    return total;
}

bool operator<(const ToolTag& a, const ToolTag& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.origin < b.origin;
}

std::string_view to_string(PatchKind kind) {
    switch (kind) {
        case PatchKind::add_tool: return "add-tool";
        case PatchKind::remove_tool: return "remove-tool";
        case PatchKind::repair_bug: return "repair-bug";
        case PatchKind::noop: return "noop";
    }
    return "noop";
}

PatchKind patch_kind_from_string(std::string_view text) {
    if (text == "add-tool") return PatchKind::add_tool;
    if (text == "remove-tool") return PatchKind::remove_tool;
    if (text == "repair-bug") return PatchKind::repair_bug;
    if (text == "noop") return PatchKind::noop;
    throw InvalidArgument("unknown patch kind '" + std::string(text) + "'");
}

std::string_view to_string(GateStatus status) {
    switch (status) {
        case GateStatus::passed: return "passed";
        case GateStatus::failed_compile: return "failed-compile";
        case GateStatus::failed_basic: return "failed-basic";
    }
    return "passed";
}

GateStatus gate_status_from_string(std::string_view text) {
    if (text == "passed") return GateStatus::passed;
    if (text == "failed-compile") return GateStatus::failed_compile;
    if (text == "failed-basic") return GateStatus::failed_basic;
    throw InvalidArgument("unknown gate status '" + std::string(text) + "'");
}

bool AgentRecord::has_tool(std::string_view name) const { return find_tool(name) != nullptr; }

const ToolTag* AgentRecord::find_tool(std::string_view name) const {
    auto it = std::lower_bound(tools.begin(), tools.end(), name,
                               [](const ToolTag& t, std::string_view n) { return t.name < n; });
    if (it == tools.end() || it->name != name) return nullptr;
    return &*it;
}

void AgentRecord::put_tool(ToolTag tag) {
    auto it = std::lower_bound(tools.begin(), tools.end(), tag.name,
                               [](const ToolTag& t, const std::string& n) { return t.name < n; });
    if (it != tools.end() && it->name == tag.name) {
        *it = std::move(tag);
    } else {
        tools.insert(it, std::move(tag));
    }
}

bool AgentRecord::erase_tool(std::string_view name) {
    auto it = std::find_if(tools.begin(), tools.end(),
                           [&](const ToolTag& t) { return t.name == name; });
    if (it == tools.end()) return false;
    tools.erase(it);
    return true;
}

double performance_of(const TaskSuccessVector& z) {
    if (z.size() == 0) return 0.0;
    return static_cast<double>(z.count()) / static_cast<double>(z.size());
}

void assign_outcome(AgentRecord& record, TaskSuccessVector z) {
    record.performance = performance_of(z);
    record.z = std::move(z);
}

AgentRecord derive_child(const AgentRecord& parent, AgentId child_id,
                         std::uint64_t born_iteration) {
    AgentRecord child = parent;
    child.id = child_id;
    child.framework_parent = parent.id;
    child.born_iteration = born_iteration;
    child.gate_status = GateStatus::passed;
    for (auto& tag : child.tools) {
        if (!tag.origin) tag.origin = parent.id;
    }
    return child;
}

void Archive::insert(AgentRecord record) {
    if (contains(record.id)) {
        throw DuplicateIdError("agent " + id_text(record.id) + " already in archive");
    }
    if (record.id != next_id()) {
        throw InvalidArgument("agent ids must be sequential: expected " + id_text(next_id()) +
                              ", got " + id_text(record.id));
    }
    if (record.z.size() != dimension_) {
        throw DimensionMismatch("agent " + id_text(record.id) + " has dimension " +
                                std::to_string(record.z.size()) + ", archive has " +
                                std::to_string(dimension_));
    }
    if (record.performance != performance_of(record.z)) {
        throw InvalidArgument("agent " + id_text(record.id) +
                              ": performance does not match its task-success vector");
    }
    if (record.id.value == 0) {
        if (record.framework_parent) throw InvalidArgument("seed agent 0 cannot have a parent");
    } else if (!record.framework_parent || *record.framework_parent >= record.id) {
        throw InvalidArgument("agent " + id_text(record.id) +
                              ": framework parent must precede it in birth order");
    }
    for (const auto& tag : record.tools) {
        if (tag.origin && *tag.origin >= record.id) {
            throw InvalidArgument("agent " + id_text(record.id) + ": tool " + tag.name +
                                  " has an origin not yet in the archive");
        }
    }
    for (const auto& patch : record.patches) {
        if (patch.source_agent && *patch.source_agent >= record.id) {
            throw InvalidArgument("agent " + id_text(record.id) +
                                  ": patch source not yet in the archive");
        }
    }
    records_.push_back(std::move(record));
}

const AgentRecord& Archive::at(AgentId id) const {
    if (!contains(id)) throw NotFoundError("agent " + id_text(id) + " not in archive");
    return records_[id.value];
}

std::vector<AgentId> Archive::selectable_ids() const {
    std::vector<AgentId> out;
    for (const auto& r : records_) {
        if (r.selectable()) out.push_back(r.id);
    }
    return out;
}

std::size_t Archive::selectable_count() const {
    return static_cast<std::size_t>(
        std::count_if(records_.begin(), records_.end(), [](const auto& r) { return r.selectable(); }));
}

std::vector<AgentId> framework_lineage(const Archive& archive, AgentId id) {
    std::vector<AgentId> chain{archive.at(id).id};
    Provenance parent = archive.at(id).framework_parent;
    while (parent) {
        chain.push_back(*parent);
        parent = archive.at(*parent).framework_parent;
    }
    return chain;
}

namespace {

void direct_sources(const AgentRecord& record, std::vector<AgentId>& out) {
    if (record.framework_parent) out.push_back(*record.framework_parent);
    for (const auto& tag : record.tools) {
        if (tag.origin) out.push_back(*tag.origin);
    }
    for (const auto& patch : record.patches) {
        if (patch.source_agent) out.push_back(*patch.source_agent);
    }
}

}  // namespace

std::set<AgentId> experience_ancestors(const Archive& archive, AgentId id, AncestryMode mode) {
    const AgentRecord& root = archive.at(id);
    std::set<AgentId> seen;
    std::vector<AgentId> frontier;
    direct_sources(root, frontier);
    if (mode == AncestryMode::direct) {
        seen.insert(frontier.begin(), frontier.end());
        seen.erase(id);
        return seen;
    }
    while (!frontier.empty()) {
        AgentId next = frontier.back();
        frontier.pop_back();
        if (next == id || !seen.insert(next).second) continue;
        direct_sources(archive.at(next), frontier);
    }
    return seen;
}

}  // namespace gea
