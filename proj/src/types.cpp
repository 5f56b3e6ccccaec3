#include "kidrec/types.hpp"

#include <charconv>

namespace kidrec {

std::string_view to_string(Source s) {
    switch (s) {
        case Source::Adult: return "adult";
        case Source::Child: return "child";
        case Source::Synth: return "synth";
    }
    return "synth";
}

Source parse_source(std::string_view text) {
    if (text == "adult") return Source::Adult;
    if (text == "child") return Source::Child;
    if (text == "synth") return Source::Synth;
    throw DatasetError("unknown source tag '" + std::string(text) + "'");
}

std::string format_ref(Source ns, std::uint32_t id) {
    std::string out(to_string(ns));
    out += ':';
    out += std::to_string(id);
    return out;
}

std::string to_string(const UserRef& ref) { return format_ref(ref.ns, ref.id); }
std::string to_string(const ItemRef& ref) { return format_ref(ref.ns, ref.id); }

namespace {

std::pair<Source, std::uint32_t> parse_ref(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw DatasetError("malformed ref '" + std::string(text) + "' (expected <source>:<id>)");
    }
    const Source ns = parse_source(text.substr(0, colon));
    const auto digits = text.substr(colon + 1);
    std::uint32_t id = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
        throw DatasetError("malformed ref id in '" + std::string(text) + "'");
    }
    return {ns, id};
}

}  // namespace

UserRef parse_user_ref(std::string_view text) {
    const auto [ns, id] = parse_ref(text);
    return {ns, id};
}

ItemRef parse_item_ref(std::string_view text) {
    const auto [ns, id] = parse_ref(text);
    return {ns, id};
}

IngestError::IngestError(std::string file, std::size_t line, const std::string& what)
    : DatasetError(file + ":" + std::to_string(line) + ": " + what), file_(std::move(file)), line_(line) {}

}  // namespace kidrec
