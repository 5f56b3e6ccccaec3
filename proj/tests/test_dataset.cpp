#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "kidrec/dataset_ops.hpp"
#include "kidrec/io.hpp"
#include "kidrec/synth.hpp"
#include "oracles.hpp"

using namespace kidrec;

namespace {

Rating child_rating(std::uint32_t u, std::uint32_t i, double v) {
    return {{Source::Child, u}, {Source::Child, i}, v, Source::Child};
}

ItemMeta meta(Source ns, std::uint32_t id, std::string title, std::optional<int> year, std::set<std::string> genres) {
    return {{ns, id}, std::move(title), year, std::move(genres)};
}

std::multiset<std::tuple<std::string, std::string, double>> multiset_of(const Dataset& ds) {
    std::multiset<std::tuple<std::string, std::string, double>> out;
    for (const auto& r : ds.ratings()) out.emplace(to_string(r.user), to_string(r.item), r.value);
    return out;
}

std::string serialized(const Dataset& ds) {
    std::ostringstream out;
    write_interchange(out, ds);
    write_items(out, ds);
    return out.str();
}

// uA: 2 children's + 3 other, uB: 1 children's.
Dataset kplus_fixture() {
    DatasetBuilder b;
    const UserRef ua{Source::Adult, 1}, ub{Source::Adult, 2};
    for (std::uint32_t i = 1; i <= 5; ++i) {
        b.add({ua, {Source::Adult, i}, 4.0, Source::Adult});
        b.add_meta(meta(Source::Adult, i, "m" + std::to_string(i), 1990, {i <= 2 ? "Children's" : "Drama"}));
    }
    b.add({ub, {Source::Adult, 1}, 3.0, Source::Adult});
    return std::move(b).build();
}

}  // namespace

TEST_SUITE("types") {
    TEST_CASE("refs format and parse") {
        const UserRef u{Source::Adult, 17};
        CHECK(to_string(u) == "adult:17");
        CHECK(parse_user_ref("adult:17") == u);
        CHECK(parse_item_ref("child:4") == ItemRef{Source::Child, 4});
        CHECK_THROWS(parse_user_ref("adult17"));
        CHECK_THROWS(parse_user_ref("martian:1"));
    }

    TEST_CASE("children's flag follows the genre label") {
        CHECK(meta(Source::Adult, 1, "x", 1995, {"Animation", "Children's"}).is_children());
        CHECK_FALSE(meta(Source::Adult, 1, "x", 1995, {"Animation"}).is_children());
    }
}

TEST_SUITE("dataset") {
    TEST_CASE("stats are recounts of the rating collection") {
        const auto d = oracle::random_dense(30, 20, 0.3, oracle::Values::Integer, 3).dataset();
        std::set<UserRef> users;
        std::set<ItemRef> items;
        for (const auto& r : d.ratings()) {
            users.insert(r.user);
            items.insert(r.item);
        }
        CHECK(d.stats() == DatasetStats{users.size(), items.size(), d.ratings().size()});
        for (std::uint32_t u = 0; u < d.user_count(); ++u) {
            for (const auto& e : d.user_ratings(u)) CHECK(e.index < d.item_count());
        }
    }

    TEST_CASE("duplicates and out-of-range values are rejected") {
        CHECK_THROWS_AS(Dataset::from_ratings({child_rating(1, 1, 3), child_rating(1, 1, 4)}), DatasetError);
        CHECK_THROWS_AS(Dataset::from_ratings({child_rating(1, 1, 5.5)}), DatasetError);
        CHECK_THROWS_AS(Dataset::from_ratings({child_rating(1, 1, 0.5)}), DatasetError);
        DatasetBuilder b;
        b.add(child_rating(1, 1, 3));
        CHECK_FALSE(b.try_add(child_rating(1, 1, 4)));
        CHECK_THROWS_AS(b.add(child_rating(1, 1, 4)), DatasetError);
    }

    TEST_CASE("means") {
        const auto d = Dataset::from_ratings({child_rating(1, 1, 3), child_rating(1, 2, 5), child_rating(2, 1, 1)});
        CHECK(d.user_mean(*d.user_index({Source::Child, 1})) == 4.0);
        CHECK(d.item_mean(*d.item_index({Source::Child, 1})) == 2.0);
        CHECK(d.global_mean() == 3.0);
    }
}

TEST_SUITE("ml1m") {
    const std::string movies =
        "1::Toy Story (1995)::Animation|Children's|Comedy\n"
        "2::Jumanji (1995)::Adventure|Children's|Fantasy\n"
        "3::Grumpier Old Men (1995)::Comedy|Romance\n"
        "4::Cit\xe9 des enfants perdus, La (1995)::Adventure|Sci-Fi\n";

    TEST_CASE("parses ratings and movies") {
        std::istringstream r("1::1::5::978300760\r\n1::3::3::978302109\n2::2::4::978301968\n");
        std::istringstream m(movies);
        const auto d = parse_ml1m(r, m);
        CHECK(d.stats() == DatasetStats{2, 3, 3});
        const auto toy = d.item_index({Source::Adult, 1});
        REQUIRE(toy);
        CHECK(d.meta(*toy).title == "Toy Story");
        CHECK(d.meta(*toy).year == 1995);
        CHECK(d.is_children(*toy));
        CHECK_FALSE(d.is_children(*d.item_index({Source::Adult, 3})));
        // catalog keeps unrated movies, titles converted to UTF-8
        REQUIRE(d.catalog().contains({Source::Adult, 4}));
        CHECK(d.catalog().at({Source::Adult, 4}).title == "Cit\xc3\xa9 des enfants perdus, La");
    }

    TEST_CASE("empty ratings file gives an empty dataset") {
        std::istringstream r("");
        std::istringstream m(movies);
        CHECK(parse_ml1m(r, m).stats() == DatasetStats{0, 0, 0});
    }

    TEST_CASE("duplicate pair is reported on its line") {
        std::istringstream r("1::1::5::1\n1::2::3::2\n1::1::4::3\n");
        std::istringstream m(movies);
        try {
            parse_ml1m(r, m);
            FAIL("expected an ingestion error");
        } catch (const IngestError& e) {
            CHECK(e.line() == 3);
        }
    }

    TEST_CASE("malformed and out-of-range lines") {
        for (const char* bad : {"1::1::5\n", "1::1::x::1\n", "1::1::6::1\n", "1::1::0::1\n", "a::1::3::1\n", "1::1::3::t\n"}) {
            std::istringstream r(std::string("2::2::4::1\n") + bad);
            std::istringstream m(movies);
            try {
                parse_ml1m(r, m);
                FAIL("accepted " << bad);
            } catch (const IngestError& e) {
                CHECK(e.line() == 2);
            }
        }
    }

    TEST_CASE("movie line with parentheses inside the title") {
        const auto x = parse_ml1m_movie_line("2019::Seven Samurai (The Magnificent Seven) (Shichinin no samurai) (1954)::Action|Drama");
        CHECK(x.title == "Seven Samurai (The Magnificent Seven) (Shichinin no samurai)");
        CHECK(x.year == 1954);
        CHECK(x.genres == std::set<std::string>{"Action", "Drama"});
    }
}

TEST_SUITE("interchange") {
    TEST_CASE("round trip keeps stats, ratings and metadata") {
        auto p = child_defaults();
        p.user_count = 300;
        p.item_count = 120;
        p.target_rating_count = 2000;
        const auto ds = generate_synthetic(p);
        std::stringstream ratings, items;
        write_interchange(ratings, ds);
        write_items(items, ds);
        DatasetBuilder b;
        const auto loaded = read_interchange(ratings);
        for (const auto& r : loaded.ratings()) b.add(r);
        read_items(items, b);
        const auto back = std::move(b).build();
        CHECK(back.stats() == ds.stats());
        CHECK(multiset_of(back) == multiset_of(ds));
        CHECK(serialized(back) == serialized(ds));
    }

    TEST_CASE("half-star values and awkward titles survive") {
        DatasetBuilder b;
        b.add({{Source::Synth, 1}, {Source::Synth, 7}, 3.5, Source::Synth});
        b.add_meta(meta(Source::Synth, 7, "Quote \"this\", please", std::nullopt, {"A", "B"}));
        const auto ds = std::move(b).build();
        std::stringstream ratings, items;
        write_interchange(ratings, ds);
        write_items(items, ds);
        DatasetBuilder c;
        const auto loaded = read_interchange(ratings);
        for (const auto& r : loaded.ratings()) c.add(r);
        read_items(items, c);
        const auto back = std::move(c).build();
        CHECK(back.ratings()[0].value == 3.5);
        CHECK(back.meta(0).title == "Quote \"this\", please");
        CHECK_FALSE(back.meta(0).year);
        CHECK(back.meta(0).genres == std::set<std::string>{"A", "B"});
    }

    TEST_CASE("bad interchange rows name their line") {
        std::istringstream in("user,item,value,source\nchild:1,child:2,4,child\nchild:1,child:3,9,child\n");
        try {
            read_interchange(in);
            FAIL("accepted a value of 9");
        } catch (const IngestError& e) {
            CHECK(e.line() == 3);
        }
        std::istringstream header("u,i,v\n");
        CHECK_THROWS_AS(read_interchange(header), IngestError);
    }
}

TEST_SUITE("filter") {
    TEST_CASE("k = 1 is the identity") {
        const auto d = oracle::random_dense(20, 20, 0.2, oracle::Values::Integer, 9).dataset();
        CHECK(serialized(filter_min_ratings(d, 1)) == serialized(d));
        CHECK_THROWS(filter_min_ratings(d, 0));
    }

    TEST_CASE("only users with enough ratings survive") {
        const auto d = Dataset::from_ratings(
            {child_rating(1, 1, 3), child_rating(1, 2, 3), child_rating(1, 3, 3), child_rating(2, 4, 5)});
        const auto f = filter_min_ratings(d, 2);
        CHECK(f.stats() == DatasetStats{1, 3, 3});
        CHECK_FALSE(f.item_index({Source::Child, 4}));
    }

    TEST_CASE("brute force: kept users, monotone stats, nested thresholds") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto dense = oracle::random_dense(15, 12, 0.5, oracle::Values::Integer, seed);
            const auto d = dense.dataset();
            DatasetStats prev = d.stats();
            for (std::size_t k = 1; k <= 10; ++k) {
                const auto f = filter_min_ratings(d, k);
                std::size_t users = 0, ratings = 0;
                for (std::size_t u = 0; u < dense.users; ++u) {
                    const auto n = dense.rated_by_user(u);
                    if (n >= k) {
                        ++users;
                        ratings += n;
                    }
                }
                CHECK(f.user_count() == users);
                CHECK(f.ratings().size() == ratings);
                CHECK(f.user_count() <= prev.users);
                CHECK(f.item_count() <= prev.items);
                CHECK(f.ratings().size() <= prev.ratings);
                prev = f.stats();
                for (std::size_t k2 = 1; k2 <= k; ++k2) CHECK(serialized(filter_min_ratings(f, k2)) == serialized(f));
            }
        }
    }

    TEST_CASE("synthetic child data: users non-increasing for k = 2..20") {
        const auto ds = generate_synthetic(child_defaults());
        std::size_t prev = ds.user_count();
        for (std::size_t k = 2; k <= 20; ++k) {
            const auto n = filter_min_ratings(ds, k).user_count();
            CHECK(n <= prev);
            prev = n;
        }
    }
}

TEST_SUITE("split") {
    TEST_CASE("ten ratings at 0.6") {
        std::vector<Rating> rs;
        for (std::uint32_t k = 0; k < 10; ++k) rs.push_back(child_rating(k / 3 + 1, k + 1, 1.0 + k % 5));
        const auto ds = Dataset::from_ratings(rs);
        const auto s = split(ds, 0.6, 42);
        CHECK(s.train.ratings().size() == 6);
        CHECK(s.test.ratings().size() == 4);
        auto all = multiset_of(s.train);
        for (const auto& x : multiset_of(s.test)) {
            CHECK_FALSE(all.contains(x));
            all.insert(x);
        }
        CHECK(all == multiset_of(ds));
        const auto again = split(ds, 0.6, 42);
        CHECK(serialized(again.train) == serialized(s.train));
        CHECK(serialized(again.test) == serialized(s.test));
        CHECK_THROWS(split(ds, 0.0, 1));
        CHECK_THROWS(split(ds, 1.0, 1));
    }

    TEST_CASE("28,368 ratings at 0.6 leave 11,347 for testing") {
        std::vector<Rating> rs;
        for (std::uint32_t k = 0; k < 28368; ++k) rs.push_back(child_rating(k / 100 + 1, k % 100 + 1, 4.0));
        const auto s = split(Dataset::from_ratings(rs), 0.6, 7);
        CHECK(s.test.ratings().size() == 11347);
        CHECK(s.train.ratings().size() == 17021);
    }

    TEST_CASE("partition holds for many seeds and fractions") {
        const auto ds = oracle::random_dense(20, 20, 0.4, oracle::Values::HalfStar, 5).dataset();
        const auto n = ds.ratings().size();
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            for (double f : {0.1, 0.5, 0.6, 0.9}) {
                const auto s = split(ds, f, seed);
                CHECK(s.train.ratings().size() == static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 0.5)));
                auto all = multiset_of(s.train);
                const auto te = multiset_of(s.test);
                for (const auto& x : te) CHECK_FALSE(all.contains(x));
                all.insert(te.begin(), te.end());
                CHECK(all == multiset_of(ds));
            }
        }
    }

    TEST_CASE("k-fold test sets partition the ratings") {
        const auto ds = oracle::random_dense(20, 20, 0.4, oracle::Values::Integer, 8).dataset();
        const auto folds = k_fold(ds, 5, 3);
        REQUIRE(folds.size() == 5);
        std::multiset<std::tuple<std::string, std::string, double>> tests;
        for (const auto& f : folds) {
            const auto te = multiset_of(f.test);
            auto tr = multiset_of(f.train);
            CHECK(tr.size() + te.size() == ds.ratings().size());
            for (const auto& x : te) CHECK_FALSE(tr.contains(x));
            tests.insert(te.begin(), te.end());
            const auto sz = f.test.ratings().size();
            CHECK((sz == ds.ratings().size() / 5 || sz == ds.ratings().size() / 5 + 1));
        }
        CHECK(tests == multiset_of(ds));
        CHECK_THROWS(k_fold(ds, 1, 3));
    }
}

TEST_SUITE("merge") {
    TEST_CASE("title normalization") {
        CHECK(normalize_title("The Lion King") == "lion king the");
        CHECK(normalize_title("Lion King, The") == "lion king the");
        CHECK(normalize_title("Schindler's List") == "schindlers list");
        CHECK(normalize_title("An  American Tail: Fievel Goes West") == "american tail fievel goes west an");
        CHECK(normalize_title("Toy Story 2") == "toy story 2");
    }

    TEST_CASE("merge with an empty dataset is the identity") {
        const auto d = kplus_fixture();
        const auto r = merge(d, Dataset{});
        CHECK(serialized(r.dataset) == serialized(d));
        CHECK(r.collisions == 0);
    }

    TEST_CASE("matching by title and year") {
        DatasetBuilder a, b;
        a.add({{Source::Adult, 1}, {Source::Adult, 10}, 3.0, Source::Adult});
        a.add_meta(meta(Source::Adult, 10, "Lion King, The", 1994, {"Animation", "Children's"}));
        b.add({{Source::Child, 1}, {Source::Child, 3}, 5.0, Source::Child});
        b.add_meta(meta(Source::Child, 3, "The Lion King", 1994, {"Musical"}));
        const auto da = std::move(a).build();
        const auto db = std::move(b).build();
        CHECK(merge(da, db, ItemMatching::None).dataset.item_count() == 2);
        const auto m = merge(da, db, ItemMatching::ByTitleYear);
        CHECK(m.dataset.item_count() == 1);
        CHECK(m.unified_items == 1);
        CHECK(m.dataset.user_count() == 2);
        CHECK(m.dataset.meta(0).genres.contains("Musical"));
        CHECK(m.dataset.is_children(0));
    }

    TEST_CASE("different years stay apart; a missing year matches") {
        DatasetBuilder a, b;
        a.add({{Source::Adult, 1}, {Source::Adult, 10}, 3.0, Source::Adult});
        a.add_meta(meta(Source::Adult, 10, "Hamlet", 1990, {}));
        b.add({{Source::Child, 1}, {Source::Child, 3}, 5.0, Source::Child});
        b.add_meta(meta(Source::Child, 3, "Hamlet", 1996, {}));
        b.add({{Source::Child, 1}, {Source::Child, 4}, 4.0, Source::Child});
        b.add_meta(meta(Source::Child, 4, "hamlet", std::nullopt, {}));
        const auto m = merge(std::move(a).build(), std::move(b).build());
        CHECK(m.dataset.item_count() == 2);
    }

    TEST_CASE("collisions keep the first rating and are counted") {
        DatasetBuilder a, b;
        a.add({{Source::Child, 1}, {Source::Child, 10}, 3.0, Source::Child});
        a.add_meta(meta(Source::Child, 10, "Heidi", 1937, {}));
        b.add({{Source::Child, 1}, {Source::Child, 20}, 5.0, Source::Child});
        b.add_meta(meta(Source::Child, 20, "Heidi", 1937, {}));
        const auto m = merge(std::move(a).build(), std::move(b).build());
        CHECK(m.collisions == 1);
        CHECK(m.dataset.ratings().size() == 1);
        CHECK(m.dataset.ratings()[0].value == 3.0);
    }

    TEST_CASE("disjoint namespaces: user counts add up") {
        auto p = child_defaults();
        p.user_count = 200;
        p.target_rating_count = 1500;
        auto adult = adult_defaults();
        adult.user_count = 100;
        adult.item_count = 300;
        adult.target_rating_count = 4000;
        const auto a = generate_synthetic(adult);
        const auto c = generate_synthetic(p, children_catalog(a));
        const auto m = merge(c, a);
        CHECK(m.dataset.user_count() == a.user_count() + c.user_count());
        CHECK(m.dataset.ratings().size() + m.collisions == a.ratings().size() + c.ratings().size());
        CHECK(m.unified_items > 0);
    }

    TEST_CASE("NONE matching is associative up to index order") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            std::vector<Dataset> parts;
            for (Source s : {Source::Adult, Source::Child, Source::Synth}) {
                const auto dense = oracle::random_dense(6, 6, 0.5, oracle::Values::Integer, seed * 7 + std::uint64_t(s));
                std::vector<Rating> rs;
                const auto ds = dense.dataset();
                for (const auto& r : ds.ratings()) rs.push_back({{s, r.user.id}, {s, r.item.id}, r.value, s});
                parts.push_back(Dataset::from_ratings(rs));
            }
            const auto left = merge(merge(parts[0], parts[1], ItemMatching::None).dataset, parts[2], ItemMatching::None);
            const auto right = merge(parts[0], merge(parts[1], parts[2], ItemMatching::None).dataset, ItemMatching::None);
            CHECK(multiset_of(left.dataset) == multiset_of(right.dataset));
            CHECK(left.dataset.stats() == right.dataset.stats());
        }
    }
}

TEST_SUITE("kplus") {
    TEST_CASE("selection and restriction on the fixture") {
        const auto d = kplus_fixture();
        const auto users = select_kplus_users(d, 2);
        CHECK(users == std::set<UserRef>{{Source::Adult, 1}});
        CHECK(restrict_to_users(d, users, RestrictMode::ChildrenOnly).ratings().size() == 2);
        CHECK(restrict_to_users(d, users, RestrictMode::AllRatings).ratings().size() == 5);
        CHECK(restrict_to_users(d, {}, RestrictMode::AllRatings).empty());
    }

    TEST_CASE("no children's items selects nobody") {
        const auto d = oracle::random_dense(10, 10, 0.5, oracle::Values::Integer, 2).dataset();
        CHECK(select_kplus_users(d, 1).empty());
    }

    TEST_CASE("agrees with a full scan") {
        auto p = adult_defaults();
        p.user_count = 300;
        p.item_count = 200;
        p.target_rating_count = 9000;
        p.children_fraction = 0.1;
        const auto d = generate_synthetic(p);
        for (std::size_t min_children : {1, 2, 3, 5}) {
            std::map<UserRef, std::size_t> children;
            std::size_t children_ratings = 0;
            for (const auto& r : d.ratings()) {
                const auto& m = d.catalog().at(r.item);
                if (std::find(m.genres.begin(), m.genres.end(), "Children's") != m.genres.end()) ++children[r.user];
            }
            std::set<UserRef> expect;
            for (const auto& [u, n] : children) {
                if (n >= min_children) {
                    expect.insert(u);
                    children_ratings += n;
                }
            }
            const auto got = select_kplus_users(d, min_children);
            CHECK(got == expect);
            CHECK(restrict_to_users(d, got).ratings().size() == children_ratings);
        }
    }
}

TEST_SUITE("histogram") {
    TEST_CASE("examples") {
        CHECK(activity_histogram(Dataset{}).empty());
        const auto d = Dataset::from_ratings({child_rating(1, 1, 3), child_rating(1, 2, 3), child_rating(1, 3, 3),
                                              child_rating(2, 1, 3), child_rating(2, 2, 3), child_rating(2, 3, 3),
                                              child_rating(3, 1, 3)});
        CHECK(activity_histogram(d) == std::map<std::size_t, std::size_t>{{1, 1}, {3, 2}});
        std::ostringstream out;
        write_histogram(out, activity_histogram(d));
        CHECK(out.str() == "ratings_per_user,user_count\n1,1\n3,2\n");
    }

    TEST_CASE("buckets sum to the user count") {
        const auto d = generate_synthetic(child_defaults());
        std::size_t total = 0;
        for (const auto& [k, n] : activity_histogram(d)) total += n;
        CHECK(total == d.user_count());
        CHECK(activity_histogram(filter_min_ratings(d, 20)).begin()->first >= 20);
    }
}

TEST_SUITE("synthetic") {
    TEST_CASE("saturation: one user rates every item") {
        SynthParams p;
        p.user_count = 1;
        p.item_count = 5;
        p.target_rating_count = 5;
        for (std::uint64_t seed : {1, 2, 99}) {
            p.seed = seed;
            const auto d = generate_synthetic(p);
            CHECK(d.stats() == DatasetStats{1, 5, 5});
        }
    }

    TEST_CASE("deterministic per seed") {
        auto p = child_defaults();
        p.seed = 17;
        CHECK(serialized(generate_synthetic(p)) == serialized(generate_synthetic(p)));
        auto q = p;
        q.seed = 18;
        CHECK(serialized(generate_synthetic(p)) != serialized(generate_synthetic(q)));
    }

    TEST_CASE("empirical mean tracks the value distribution") {
        SynthParams p;
        p.user_count = 500;
        p.item_count = 400;
        p.target_rating_count = 10000;
        p.value_distribution = {0.0, 0.0, 0.1, 0.4, 0.5};
        const auto d = generate_synthetic(p);
        CHECK(d.ratings().size() == 10000);
        CHECK(d.global_mean() == doctest::Approx(3 * 0.1 + 4 * 0.4 + 5 * 0.5).epsilon(0.05 / 4.4));
        for (const auto& r : d.ratings()) CHECK(r.value >= 3.0);
    }

    TEST_CASE("per-user counts respect the bounds and the target") {
        auto p = child_defaults();
        const auto counts = synthetic_user_counts(p);
        std::size_t total = 0;
        for (auto c : counts) {
            CHECK(c >= 1);
            CHECK(c <= p.item_count);
            total += c;
        }
        CHECK(total == p.target_rating_count);
    }

    TEST_CASE("invalid parameters") {
        SynthParams p;
        p.user_count = 2;
        p.item_count = 2;
        p.target_rating_count = 5;
        CHECK_THROWS_AS(generate_synthetic(p), DatasetError);
        SynthParams q;
        q.value_distribution = {0.2, 0.2, 0.2, 0.2, 0.1};
        CHECK_THROWS_AS(q.validate(), DatasetError);
        SynthParams r;
        r.user_count = 0;
        CHECK_THROWS_AS(r.validate(), DatasetError);
        SynthParams s;
        s.activity_exponent = 1.0;
        CHECK_THROWS_AS(s.validate(), DatasetError);
    }

    TEST_CASE("catalog titles go to the most popular items") {
        auto a = adult_defaults();
        a.user_count = 200;
        a.item_count = 300;
        a.target_rating_count = 8000;
        const auto adult = generate_synthetic(a);
        const auto catalog = children_catalog(adult);
        REQUIRE_FALSE(catalog.empty());
        for (const auto& m : catalog) CHECK(m.is_children());
        auto c = child_defaults();
        c.user_count = 500;
        c.target_rating_count = 3000;
        const auto child = generate_synthetic(c, catalog);
        std::set<std::string> titles;
        for (const auto& [ref, m] : child.catalog()) titles.insert(m.title);
        for (const auto& m : catalog) CHECK(titles.contains(m.title));
    }

    TEST_CASE("default child data loses most users between k = 2 and k = 20") {
        const auto d = generate_synthetic(child_defaults());
        const double k2 = static_cast<double>(filter_min_ratings(d, 2).user_count());
        const double k20 = static_cast<double>(filter_min_ratings(d, 20).user_count());
        CHECK(1.0 - k20 / k2 >= 0.9);
    }
}
