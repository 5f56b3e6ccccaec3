#include "kidrec/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace kidrec {

namespace {

std::vector<std::string_view> split_on(std::string_view line, std::string_view delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + delim.size();
    }
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    if (text.empty()) return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string csv_quote(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Minimal RFC 4180 splitter for a single physical line.
std::vector<std::string> csv_fields(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < line.size() && line[k + 1] == '"') {
                    cur += '"';
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string latin1_to_utf8(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (unsigned char c : text) {
        if (c < 0x80) {
            out += static_cast<char>(c);
        } else {
            out += static_cast<char>(0xC0 | (c >> 6));
            out += static_cast<char>(0x80 | (c & 0x3F));
        }
    }
    return out;
}

ItemMeta parse_ml1m_movie_line(std::string_view line) {
    const auto first = line.find("::");
    const auto last = line.rfind("::");
    if (first == std::string_view::npos || first == last) {
        throw DatasetError("expected MovieID::Title (Year)::Genres");
    }
    ItemMeta meta;
    std::uint32_t id = 0;
    if (!parse_number(line.substr(0, first), id)) throw DatasetError("bad movie id");
    meta.item = {Source::Adult, id};

    std::string title = latin1_to_utf8(line.substr(first + 2, last - first - 2));
    // Trailing "(YYYY)" carries the year.
    if (title.size() >= 6 && title.back() == ')') {
        const auto open = title.rfind('(');
        int year = 0;
        if (open != std::string::npos && parse_number(std::string_view(title).substr(open + 1, title.size() - open - 2), year)) {
            meta.year = year;
            title.erase(open);
            while (!title.empty() && title.back() == ' ') title.pop_back();
        }
    }
    meta.title = std::move(title);

    const auto genres = line.substr(last + 2);
    if (!genres.empty()) {
        for (auto g : split_on(genres, "|")) {
            if (!g.empty()) meta.genres.emplace(g);
        }
    }
    return meta;
}

Dataset parse_ml1m(std::istream& ratings, std::istream& movies, const std::string& ratings_name,
                   const std::string& movies_name) {
    DatasetBuilder builder;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(movies, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        try {
            builder.add_meta(parse_ml1m_movie_line(line));
        } catch (const DatasetError& e) {
            throw IngestError(movies_name, lineno, e.what());
        }
    }

    lineno = 0;
    while (std::getline(ratings, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_on(line, "::");
        std::uint32_t user = 0;
        std::uint32_t item = 0;
        double value = 0;
        std::int64_t timestamp = 0;
        if (fields.size() != 4 || !parse_number(fields[0], user) || !parse_number(fields[1], item) ||
            !parse_number(fields[2], value) || !parse_number(fields[3], timestamp)) {
            throw IngestError(ratings_name, lineno, "expected UserID::MovieID::Rating::Timestamp");
        }
        if (!(value >= kMinRating && value <= kMaxRating)) {
            throw IngestError(ratings_name, lineno, "rating " + std::string(fields[2]) + " outside [1, 5]");
        }
        const Rating r{{Source::Adult, user}, {Source::Adult, item}, value, Source::Adult};
        if (!builder.try_add(r)) {
            throw IngestError(ratings_name, lineno, "duplicate rating for user " + std::to_string(user) +
                                                        " and movie " + std::to_string(item));
        }
    }
    return std::move(builder).build();
}

Dataset load_ml1m(const std::filesystem::path& ratings_path, const std::filesystem::path& movies_path) {
    std::ifstream ratings(ratings_path, std::ios::binary);
    if (!ratings) throw DatasetError("cannot open " + ratings_path.string());
    std::ifstream movies(movies_path, std::ios::binary);
    if (!movies) throw DatasetError("cannot open " + movies_path.string());
    return parse_ml1m(ratings, movies, ratings_path.string(), movies_path.string());
}

void write_interchange(std::ostream& out, const Dataset& ds) {
    out << "user,item,value,source\n";
    for (const auto& r : ds.ratings()) {
        out << to_string(r.user) << ',' << to_string(r.item) << ',' << format_double(r.value) << ','
            << to_string(r.source) << '\n';
    }
}

void write_interchange(const std::filesystem::path& path, const Dataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DatasetError("cannot write " + path.string());
    write_interchange(out, ds);
}

Dataset read_interchange(std::istream& in, const std::string& name) {
    DatasetBuilder builder;
    std::string line;
    std::size_t lineno = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (header) {
            if (line != "user,item,value,source") throw IngestError(name, lineno, "missing header user,item,value,source");
            header = false;
            continue;
        }
        if (line.empty()) continue;
        const auto fields = split_on(line, ",");
        double value = 0;
        if (fields.size() != 4 || !parse_number(fields[2], value)) {
            throw IngestError(name, lineno, "expected user,item,value,source");
        }
        try {
            const Rating r{parse_user_ref(fields[0]), parse_item_ref(fields[1]), value, parse_source(fields[3])};
            if (!builder.try_add(r)) throw DatasetError("duplicate (user, item) pair");
        } catch (const IngestError&) {
            throw;
        } catch (const DatasetError& e) {
            throw IngestError(name, lineno, e.what());
        }
    }
    return std::move(builder).build();
}

void write_items(std::ostream& out, const Dataset& ds) {
    out << "item,title,year,genres\n";
    for (std::uint32_t i = 0; i < ds.item_count(); ++i) {
        const auto& m = ds.meta(i);
        std::string genres;
        for (const auto& g : m.genres) {
            if (!genres.empty()) genres += '|';
            genres += g;
        }
        out << to_string(ds.items()[i]) << ',' << csv_quote(m.title) << ','
            << (m.year ? std::to_string(*m.year) : std::string()) << ',' << csv_quote(genres) << '\n';
    }
}

void read_items(std::istream& in, DatasetBuilder& builder, const std::string& name) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (lineno == 1) {
            if (line != "item,title,year,genres") throw IngestError(name, lineno, "missing header item,title,year,genres");
            continue;
        }
        if (line.empty()) continue;
        const auto fields = csv_fields(line);
        if (fields.size() != 4) throw IngestError(name, lineno, "expected item,title,year,genres");
        try {
            ItemMeta meta;
            meta.item = parse_item_ref(fields[0]);
            meta.title = fields[1];
            if (!fields[2].empty()) {
                int year = 0;
                if (!parse_number(std::string_view(fields[2]), year)) throw DatasetError("bad year");
                meta.year = year;
            }
            if (!fields[3].empty()) {
                for (auto g : split_on(fields[3], "|")) meta.genres.emplace(g);
            }
            builder.add_meta(std::move(meta));
        } catch (const DatasetError& e) {
            throw IngestError(name, lineno, e.what());
        }
    }
}

Dataset load_interchange(const std::filesystem::path& ratings_path, const std::filesystem::path& items_path) {
    std::ifstream in(ratings_path, std::ios::binary);
    if (!in) throw DatasetError("cannot open " + ratings_path.string());
    Dataset ratings = read_interchange(in, ratings_path.string());
    if (items_path.empty() || !std::filesystem::exists(items_path)) return ratings;

    DatasetBuilder builder;
    std::ifstream items(items_path, std::ios::binary);
    read_items(items, builder, items_path.string());
    for (const auto& r : ratings.ratings()) builder.add(r);
    return std::move(builder).build();
}

std::map<std::size_t, std::size_t> activity_histogram(const Dataset& ds) {
    std::map<std::size_t, std::size_t> hist;
    for (std::uint32_t u = 0; u < ds.user_count(); ++u) ++hist[ds.user_ratings(u).size()];
    return hist;
}

void write_histogram(std::ostream& out, const std::map<std::size_t, std::size_t>& hist) {
    out << "ratings_per_user,user_count\n";
    for (const auto& [k, n] : hist) out << k << ',' << n << '\n';
}

}  // namespace kidrec
