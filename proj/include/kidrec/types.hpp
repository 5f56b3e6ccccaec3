#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kidrec {

/// Provenance of a rating. Doubles as the namespace for user and item refs,
/// so refs coming from different sources never collide.
enum class Source : std::uint8_t { Adult = 0, Child = 1, Synth = 2 };

std::string_view to_string(Source s);
Source parse_source(std::string_view text);

struct UserRef {
    Source ns = Source::Synth;
    std::uint32_t id = 0;

    auto operator<=>(const UserRef&) const = default;
};

struct ItemRef {
    Source ns = Source::Synth;
    std::uint32_t id = 0;

    auto operator<=>(const ItemRef&) const = default;
};

// "adult:17", "child:4", "synth:9"
std::string format_ref(Source ns, std::uint32_t id);
std::string to_string(const UserRef& ref);
std::string to_string(const ItemRef& ref);
UserRef parse_user_ref(std::string_view text);
ItemRef parse_item_ref(std::string_view text);

inline constexpr double kMinRating = 1.0;
inline constexpr double kMaxRating = 5.0;

struct Rating {
    UserRef user;
    ItemRef item;
    double value = 0.0;
    Source source = Source::Synth;

    bool operator==(const Rating&) const = default;
};

inline constexpr std::string_view kChildrensGenre = "Children's";

struct ItemMeta {
    ItemRef item;
    std::string title;
    std::optional<int> year;
    std::set<std::string> genres;

    bool is_children() const { return genres.contains(std::string(kChildrensGenre)); }
};

/// Thrown for any dataset construction or ingestion failure.
class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ingestion failure tied to a specific input line (1-based).
class IngestError : public DatasetError {
public:
    IngestError(std::string file, std::size_t line, const std::string& what);

    std::size_t line() const { return line_; }
    const std::string& file() const { return file_; }

private:
    std::string file_;
    std::size_t line_;
};

}  // namespace kidrec

template <>
struct std::hash<kidrec::UserRef> {
    std::size_t operator()(const kidrec::UserRef& r) const noexcept {
        return std::hash<std::uint64_t>{}((std::uint64_t(r.ns) << 32) | r.id);
    }
};

template <>
struct std::hash<kidrec::ItemRef> {
    std::size_t operator()(const kidrec::ItemRef& r) const noexcept {
        return std::hash<std::uint64_t>{}((std::uint64_t(r.ns) << 32) | r.id);
    }
};
