#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "kidrec/dataset.hpp"

namespace kidrec {

/// Loads the GroupLens ML1M release (`ratings.dat`, `movies.dat`).
///
/// Both files are `::`-delimited ISO-8859-1; titles are converted to UTF-8.
/// Timestamps are validated as integers and dropped. Users and items land in
/// the Adult namespace. Throws IngestError naming the offending line.
Dataset load_ml1m(const std::filesystem::path& ratings_path, const std::filesystem::path& movies_path);

/// Stream variants; `name` is used in error messages.
Dataset parse_ml1m(std::istream& ratings, std::istream& movies, const std::string& ratings_name = "ratings.dat",
                   const std::string& movies_name = "movies.dat");
ItemMeta parse_ml1m_movie_line(std::string_view line);

std::string latin1_to_utf8(std::string_view text);

// Canonical interchange format: CSV with header `user,item,value,source`.
void write_interchange(std::ostream& out, const Dataset& ds);
void write_interchange(const std::filesystem::path& path, const Dataset& ds);
Dataset read_interchange(std::istream& in, const std::string& name = "<stream>");

// Item sidecar: CSV `item,title,year,genres` (genres `|`-joined, title quoted).
void write_items(std::ostream& out, const Dataset& ds);
void read_items(std::istream& in, DatasetBuilder& builder, const std::string& name = "<stream>");

/// Reads `ratings_path` and, when it exists, the item sidecar `items_path`.
Dataset load_interchange(const std::filesystem::path& ratings_path, const std::filesystem::path& items_path = {});

/// Number of users per ratings-per-user count. Sum of values = user_count.
std::map<std::size_t, std::size_t> activity_histogram(const Dataset& ds);
void write_histogram(std::ostream& out, const std::map<std::size_t, std::size_t>& hist);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace kidrec
