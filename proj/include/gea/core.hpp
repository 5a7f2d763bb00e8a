#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gea {

/// Sequential agent identifier. Id order is birth order; the seed agent is 0.
struct AgentId {
    std::uint64_t value = 0;

    friend constexpr auto operator<=>(AgentId, AgentId) = default;
};

/// Origin of adopted material. `std::nullopt` is the SELF sentinel for tool
/// origins and patch sources, and NONE for the seed agent's parent.
using Provenance = std::optional<AgentId>;

/// Binary task-success vector over the probe set.
class TaskSuccessVector {
public:
    TaskSuccessVector() = default;
    explicit TaskSuccessVector(std::size_t dimension) : bits_(dimension, 0) {}
    explicit TaskSuccessVector(std::vector<std::uint8_t> bits);

    /// Parses a string of '0'/'1' characters.
    static TaskSuccessVector from_string(std::string_view bits);
    std::string to_string() const;

    std::size_t size() const noexcept { return bits_.size(); }
    bool test(std::size_t i) const { return bits_.at(i) != 0; }
    void set(std::size_t i, bool value) { bits_.at(i) = value ? 1 : 0; }

    std::size_t count() const noexcept;
    /// Dot product; throws DimensionMismatch on unequal lengths.
    std::size_t dot(const TaskSuccessVector& other) const;

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    friend bool operator==(const TaskSuccessVector&, const TaskSuccessVector&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

struct ToolTag {
    std::string name;
    Provenance origin;

    friend bool operator==(const ToolTag&, const ToolTag&) = default;
    /// Sort key for byte-stable output: name, then origin (SELF first).
    friend bool operator<(const ToolTag& a, const ToolTag& b);
};

enum class PatchKind { add_tool, remove_tool, repair_bug, noop };

std::string_view to_string(PatchKind kind);
PatchKind patch_kind_from_string(std::string_view text);

struct Patch {
    std::uint64_t id = 0;
    PatchKind kind = PatchKind::noop;
    /// Tool name for add/remove, bug identifier for repair, empty for noop.
    std::string payload;
    /// Set only after an Act evaluation measured the change.
    std::optional<double> delta_score;
    Provenance source_agent;
    /// Patch applied to a phenotype where it had nothing to act on.
    bool ineffective = false;
    /// add-tool only: framework bug the new tool's implementation breaks.
    /// Empty for a clean patch.
    std::string regression;

    friend bool operator==(const Patch&, const Patch&) = default;
};

enum class GateStatus { passed, failed_compile, failed_basic };

std::string_view to_string(GateStatus status);
GateStatus gate_status_from_string(std::string_view text);

struct AgentRecord {
    AgentId id;
    Provenance framework_parent;
    /// Sorted by name, at most one tag per tool name.
    std::vector<ToolTag> tools;
    std::set<std::string> broken_bugs;
    TaskSuccessVector z;
    double performance = 0.0;
    /// Full patch history of the lineage, oldest first.
    std::vector<Patch> patches;
    std::uint64_t born_iteration = 0;
    GateStatus gate_status = GateStatus::passed;

    bool has_tool(std::string_view name) const;
    const ToolTag* find_tool(std::string_view name) const;
    /// Inserts or replaces the tag for `tag.name`, keeping `tools` sorted.
    void put_tool(ToolTag tag);
    bool erase_tool(std::string_view name);

    bool selectable() const noexcept { return gate_status == GateStatus::passed; }

    friend bool operator==(const AgentRecord&, const AgentRecord&) = default;
};

/// Exact success rate of a vector: ones / D (0 for an empty vector).
double performance_of(const TaskSuccessVector& z);

/// Sets `z` and the derived performance together.
void assign_outcome(AgentRecord& record, TaskSuccessVector z);

/// Offspring skeleton: copies the parent's phenotype and patch history, sets
/// identity fields, and rewrites inherited SELF tool origins to the parent's
/// id (the parent is where that tool entered the child's lineage).
AgentRecord derive_child(const AgentRecord& parent, AgentId child_id,
                         std::uint64_t born_iteration);

/// Append-only store of every agent produced by a run.
class Archive {
public:
    Archive() = default;
    Archive(std::size_t dimension, std::uint64_t run_seed)
        : dimension_(dimension), run_seed_(run_seed) {}

    /// Rejects duplicate ids (DuplicateIdError) and records that break birth
    /// order, dimension, or provenance validity (InvalidArgument).
    void insert(AgentRecord record);

    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    bool contains(AgentId id) const noexcept { return id.value < records_.size(); }

    /// NotFoundError on unknown id.
    const AgentRecord& at(AgentId id) const;

    std::span<const AgentRecord> records() const noexcept { return records_; }

    std::vector<AgentId> selectable_ids() const;
    std::size_t selectable_count() const;

    std::size_t dimension() const noexcept { return dimension_; }
    std::uint64_t run_seed() const noexcept { return run_seed_; }

    /// Next id the archive will accept.
    AgentId next_id() const noexcept { return AgentId{records_.size()}; }

    friend bool operator==(const Archive&, const Archive&) = default;

private:
    std::size_t dimension_ = 0;
    std::uint64_t run_seed_ = 0;
    std::vector<AgentRecord> records_;
};

/// [id, parent, grandparent, ..., 0].
std::vector<AgentId> framework_lineage(const Archive& archive, AgentId id);

enum class AncestryMode {
    transitive,  ///< closure over parents, tool origins and patch sources
    direct,      ///< only the agent's own parent, tool origins and patch sources
};

/// Unique historical agents whose experience was integrated into `id`,
/// excluding `id` itself.
std::set<AgentId> experience_ancestors(const Archive& archive, AgentId id,
                                       AncestryMode mode = AncestryMode::transitive);

}  // namespace gea
