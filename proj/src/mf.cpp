#include "kidrec/mf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "kidrec/io.hpp"
#include "kidrec/kernels.hpp"
#include "kidrec/rng.hpp"

namespace kidrec {

DivergenceError::DivergenceError(std::size_t pass, const std::string& what)
    : std::runtime_error("MF training diverged in pass " + std::to_string(pass) + ": " + what), pass_(pass) {}

std::optional<std::uint32_t> MFModel::user_index(const UserRef& u) const {
    const auto it = std::lower_bound(users.begin(), users.end(), u);
    if (it == users.end() || *it != u) return std::nullopt;
    return static_cast<std::uint32_t>(it - users.begin());
}

std::optional<std::uint32_t> MFModel::item_index(const ItemRef& i) const {
    const auto it = std::lower_bound(items.begin(), items.end(), i);
    if (it == items.end() || *it != i) return std::nullopt;
    return static_cast<std::uint32_t>(it - items.begin());
}

bool MFModel::operator==(const MFModel& o) const {
    return global_mean == o.global_mean && factors == o.factors && users == o.users && items == o.items &&
           user_bias == o.user_bias && item_bias == o.item_bias && user_factors == o.user_factors &&
           item_factors == o.item_factors;
}

MFModel mf_initialize(const Dataset& train, const PredictorConfig& cfg) {
    if (cfg.kind != Algorithm::MF) throw std::invalid_argument("mf_initialize needs an MF config");
    cfg.validate();
    if (train.empty()) throw DatasetError("MF training set is empty");

    MFModel m;
    m.config = cfg;
    m.global_mean = train.global_mean();
    m.factors = cfg.latent_factors;
    m.users.assign(train.users().begin(), train.users().end());
    m.items.assign(train.items().begin(), train.items().end());
    m.user_bias.assign(m.users.size(), 0.0);
    m.item_bias.assign(m.items.size(), 0.0);
    m.user_factors.resize(m.users.size() * m.factors);
    m.item_factors.resize(m.items.size() * m.factors);

    Rng rng(derive_seed(cfg.seed, 0));
    for (auto& x : m.user_factors) x = (2.0 * uniform01(rng) - 1.0) * cfg.init_scale;
    for (auto& x : m.item_factors) x = (2.0 * uniform01(rng) - 1.0) * cfg.init_scale;
    return m;
}

namespace {

struct Triple {
    std::uint32_t user;
    std::uint32_t item;
    double value;
};

std::vector<Triple> triples(const Dataset& train) {
    std::vector<Triple> out;
    out.reserve(train.ratings().size());
    for (std::uint32_t u = 0; u < train.user_count(); ++u) {
        for (const auto& e : train.user_ratings(u)) out.push_back({u, e.index, e.value});
    }
    return out;
}

void check_aligned(const MFModel& m, const Dataset& train) {
    if (m.users.size() != train.user_count() || m.items.size() != train.item_count() ||
        !std::equal(m.users.begin(), m.users.end(), train.users().begin()) ||
        !std::equal(m.items.begin(), m.items.end(), train.items().begin())) {
        throw std::invalid_argument("MF model is not indexed over this training set");
    }
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

double mf_loss(const MFModel& m, const Dataset& train) {
    check_aligned(m, train);
    const auto& k = simd::active();
    const double reg = m.config.regularization;
    double loss = 0.0;
    for (std::uint32_t u = 0; u < train.user_count(); ++u) {
        const auto p = m.p(u);
        const double pu_sq = k.sum_squares(p.data(), m.factors);
        for (const auto& e : train.user_ratings(u)) {
            const auto q = m.q(e.index);
            const double pred = m.global_mean + m.user_bias[u] + m.item_bias[e.index] + k.dot(p.data(), q.data(), m.factors);
            const double err = e.value - pred;
            const double penalty = m.user_bias[u] * m.user_bias[u] + m.item_bias[e.index] * m.item_bias[e.index] + pu_sq +
                                   k.sum_squares(q.data(), m.factors);
            loss += err * err + reg * penalty;
        }
    }
    return loss;
}

MFGradient mf_gradient(const MFModel& m, const Dataset& train) {
    check_aligned(m, train);
    const auto& k = simd::active();
    const double reg = m.config.regularization;
    const std::size_t f = m.factors;
    MFGradient g;
    g.user_bias.assign(m.user_bias.size(), 0.0);
    g.item_bias.assign(m.item_bias.size(), 0.0);
    g.user_factors.assign(m.user_factors.size(), 0.0);
    g.item_factors.assign(m.item_factors.size(), 0.0);
    std::vector<double> p_step(f), q_step(f);
    for (const auto& t : triples(train)) {
        const auto p = m.p(t.user);
        const auto q = m.q(t.item);
        const double pred = m.global_mean + m.user_bias[t.user] + m.item_bias[t.item] + k.dot(p.data(), q.data(), f);
        const double err = t.value - pred;
        g.user_bias[t.user] += -2.0 * (err - reg * m.user_bias[t.user]);
        g.item_bias[t.item] += -2.0 * (err - reg * m.item_bias[t.item]);
        // Unit-rate step through the training kernel; its displacement is
        // the negative half-gradient of this rating's term.
        std::copy(p.begin(), p.end(), p_step.begin());
        std::copy(q.begin(), q.end(), q_step.begin());
        k.sgd_update(p_step.data(), q_step.data(), f, err, 1.0, reg);
        for (std::size_t c = 0; c < f; ++c) {
            g.user_factors[std::size_t(t.user) * f + c] += -2.0 * (p_step[c] - p[c]);
            g.item_factors[std::size_t(t.item) * f + c] += -2.0 * (q_step[c] - q[c]);
        }
    }
    return g;
}

void mf_run_passes(MFModel& m, const Dataset& train, std::size_t passes, std::vector<double>* loss_trace) {
    check_aligned(m, train);
    const auto& k = simd::active();
    const double lr = m.config.learning_rate;
    const double reg = m.config.regularization;
    const std::size_t f = m.factors;
    const auto data = triples(train);
    std::vector<std::uint32_t> order(data.size());

    for (std::size_t pass = 0; pass < passes; ++pass) {
        std::iota(order.begin(), order.end(), 0u);
        Rng rng(derive_seed(m.config.seed, pass + 1));
        shuffle(std::span<std::uint32_t>(order), rng);
        for (const auto idx : order) {
            const auto& t = data[idx];
            double* p = m.user_factors.data() + std::size_t(t.user) * f;
            double* q = m.item_factors.data() + std::size_t(t.item) * f;
            double& bu = m.user_bias[t.user];
            double& bi = m.item_bias[t.item];
            const double err = t.value - (m.global_mean + bu + bi + k.dot(p, q, f));
            bu += lr * (err - reg * bu);
            bi += lr * (err - reg * bi);
            k.sgd_update(p, q, f, err, lr, reg);
        }
        if (!all_finite(m.user_bias) || !all_finite(m.item_bias) || !all_finite(m.user_factors) ||
            !all_finite(m.item_factors)) {
            throw DivergenceError(pass + 1, "non-finite parameter (try a smaller learning rate)");
        }
        if (loss_trace) loss_trace->push_back(mf_loss(m, train));
    }
}

MFModel mf_train(const Dataset& train, const PredictorConfig& cfg, std::vector<double>* loss_trace) {
    MFModel m = mf_initialize(train, cfg);
    mf_run_passes(m, train, cfg.iterations, loss_trace);
    return m;
}

Prediction mf_predict(const MFModel& m, const UserRef& u, const ItemRef& i) {
    const auto ui = m.user_index(u);
    const auto ii = m.item_index(i);
    double v = m.global_mean;
    if (ui) v += m.user_bias[*ui];
    if (ii) v += m.item_bias[*ii];
    if (ui && ii) v += simd::active().dot(m.p(*ui).data(), m.q(*ii).data(), m.factors);
    const bool served = ui || ii;
    if (m.config.clamp) v = clamp_rating(v);
    FallbackStage stage = FallbackStage::None;
    if (!served) stage = FallbackStage::GlobalMean;
    return {v, served, stage};
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr std::string_view kMagic = "kidrec-mf";
constexpr int kVersion = 1;

double parse_double_token(std::istream& in, const char* what) {
    std::string tok;
    if (!(in >> tok)) throw std::runtime_error(std::string("model file truncated reading ") + what);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw std::runtime_error(std::string("bad number for ") + what + ": " + tok);
    }
    return v;
}

template <typename T>
T read_value(std::istream& in, const char* what) {
    T v{};
    if (!(in >> v)) throw std::runtime_error(std::string("model file truncated reading ") + what);
    return v;
}

void expect(std::istream& in, std::string_view word) {
    std::string tok;
    if (!(in >> tok) || tok != word) throw std::runtime_error("model file: expected '" + std::string(word) + "'");
}

}  // namespace

void save_model(std::ostream& out, const MFModel& m) {
    const auto& c = m.config;
    out << kMagic << ' ' << kVersion << '\n';
    out << "factors " << m.factors << '\n';
    out << "learning_rate " << format_double(c.learning_rate) << '\n';
    out << "regularization " << format_double(c.regularization) << '\n';
    out << "iterations " << c.iterations << '\n';
    out << "init_scale " << format_double(c.init_scale) << '\n';
    out << "seed " << c.seed << '\n';
    out << "clamp " << (c.clamp ? 1 : 0) << '\n';
    out << "fallback " << c.fallback_chain.size();
    for (auto s : c.fallback_chain) out << ' ' << to_string(s);
    out << '\n';
    out << "global_mean " << format_double(m.global_mean) << '\n';
    const auto dump = [&](const auto& refs, const std::vector<double>& bias, const std::vector<double>& fac) {
        for (std::size_t r = 0; r < refs.size(); ++r) {
            out << to_string(refs[r]) << ' ' << format_double(bias[r]);
            for (std::size_t c2 = 0; c2 < m.factors; ++c2) out << ' ' << format_double(fac[r * m.factors + c2]);
            out << '\n';
        }
    };
    out << "users " << m.users.size() << '\n';
    dump(m.users, m.user_bias, m.user_factors);
    out << "items " << m.items.size() << '\n';
    dump(m.items, m.item_bias, m.item_factors);
}

MFModel load_model(std::istream& in) {
    expect(in, kMagic);
    if (read_value<int>(in, "version") != kVersion) throw std::runtime_error("unsupported model version");
    MFModel m;
    m.config.kind = Algorithm::MF;
    expect(in, "factors");
    m.factors = read_value<std::size_t>(in, "factors");
    m.config.latent_factors = m.factors;
    expect(in, "learning_rate");
    m.config.learning_rate = parse_double_token(in, "learning_rate");
    expect(in, "regularization");
    m.config.regularization = parse_double_token(in, "regularization");
    expect(in, "iterations");
    m.config.iterations = read_value<std::size_t>(in, "iterations");
    expect(in, "init_scale");
    m.config.init_scale = parse_double_token(in, "init_scale");
    expect(in, "seed");
    m.config.seed = read_value<std::uint64_t>(in, "seed");
    expect(in, "clamp");
    m.config.clamp = read_value<int>(in, "clamp") != 0;
    expect(in, "fallback");
    const auto n_stages = read_value<std::size_t>(in, "fallback");
    m.config.fallback_chain.clear();
    for (std::size_t s = 0; s < n_stages; ++s) m.config.fallback_chain.push_back(parse_fallback_stage(read_value<std::string>(in, "fallback")));
    expect(in, "global_mean");
    m.global_mean = parse_double_token(in, "global_mean");

    const auto load_rows = [&](auto& refs, std::vector<double>& bias, std::vector<double>& fac, auto parse_ref) {
        const auto n = read_value<std::size_t>(in, "row count");
        refs.resize(n);
        bias.resize(n);
        fac.resize(n * m.factors);
        for (std::size_t r = 0; r < n; ++r) {
            refs[r] = parse_ref(read_value<std::string>(in, "ref"));
            bias[r] = parse_double_token(in, "bias");
            for (std::size_t c = 0; c < m.factors; ++c) fac[r * m.factors + c] = parse_double_token(in, "factor");
        }
    };
    expect(in, "users");
    load_rows(m.users, m.user_bias, m.user_factors, [](const std::string& s) { return parse_user_ref(s); });
    expect(in, "items");
    load_rows(m.items, m.item_bias, m.item_factors, [](const std::string& s) { return parse_item_ref(s); });
    return m;
}

}  // namespace kidrec
