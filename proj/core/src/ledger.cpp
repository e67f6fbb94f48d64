#include "fnls/ledger.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "fnls/bounds.hpp"
#include "fnls/scalar.hpp"

namespace fnls {

namespace {
long long key_of(double mass) { return static_cast<long long>(std::llround(mass * 1e9)); }

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}
}  // namespace

BindingLedger::BindingLedger(int d, double p, double c_lt)
    : d_(d), p_(p), c_lt_(c_lt > 0.0 ? c_lt : default_c_LT(d)) {
    require_subcritical(d, p);
}

void BindingLedger::record(double mass, double J, const std::string& provenance) {
    if (!(mass > 0.0)) throw std::invalid_argument("ledger: mass must be positive");
    if (!(J < 0.0)) throw std::invalid_argument("ledger: J must be negative");
    const double elt = e_LT(d_, p_, c_lt_);
    const double floor = mass * elt;
    if (J < floor - 1e-6 * std::abs(floor)) {
        throw std::invalid_argument("ledger: J below the Lieb-Thirring floor");
    }
    const long long k = key_of(mass);
    auto it = table_.find(k);
    if (it != table_.end() && it->second.J <= J) return;  // keep the better value
    table_[k] = LedgerEntry{mass, J, provenance, utc_now()};
}

std::optional<double> BindingLedger::lookup(double mass) const {
    auto it = table_.find(key_of(mass));
    if (it == table_.end()) return std::nullopt;
    return it->second.J;
}

std::vector<LedgerEntry> BindingLedger::entries() const {
    std::vector<LedgerEntry> out;
    out.reserve(table_.size());
    for (const auto& [k, e] : table_) out.push_back(e);
    return out;
}

std::string BindingLedger::to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["d"] = d_;
    j["p"] = p_;
    j["c_lt"] = c_lt_;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [k, e] : table_) {
        arr.push_back({{"mass", e.mass},
                       {"J", e.J},
                       {"provenance", e.provenance},
                       {"timestamp", e.timestamp}});
    }
    j["entries"] = arr;
    return j.dump(2);
}

BindingLedger BindingLedger::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    BindingLedger led(j.at("d").get<int>(), j.at("p").get<double>(),
                      j.value("c_lt", 0.0));
    for (const auto& e : j.at("entries")) {
        LedgerEntry entry;
        entry.mass = e.at("mass").get<double>();
        entry.J = e.at("J").get<double>();
        entry.provenance = e.value("provenance", "");
        entry.timestamp = e.value("timestamp", "");
        led.table_[key_of(entry.mass)] = entry;
    }
    return led;
}

BindingVerdict binding_check(const BindingLedger& ledger, int n) {
    if (n < 2) throw std::invalid_argument("binding check needs N >= 2");
    BindingVerdict v;
    v.n = n;
    const auto jn = ledger.lookup(n);
    if (!jn) throw std::invalid_argument("ledger missing J(N)");
    v.slack = 1e-6 * std::abs(*jn);
    v.min_margin = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n - 1; ++k) {
        const auto jk = ledger.lookup(k);
        const auto jnk = ledger.lookup(n - k);
        if (!jk || !jnk) throw std::invalid_argument("ledger missing a sub-mass entry");
        const double margin = *jk + *jnk - *jn;
        v.margins.push_back(margin);
        if (margin < v.min_margin) {
            v.min_margin = margin;
            v.argmin_k = k;
        }
    }
    v.binds = v.min_margin > v.slack;
    return v;
}

std::vector<int> binding_set(const BindingLedger& ledger, int n_max) {
    std::vector<int> out;
    if (n_max >= 1 && ledger.lookup(1)) out.push_back(1);
    for (int n = 2; n <= n_max; ++n) {
        if (binding_check(ledger, n).binds) out.push_back(n);
    }
    return out;
}

LedgerDecomposition binding_set_decompose(const BindingLedger& ledger, int n) {
    LedgerDecomposition out;
    out.n = n;
    const auto jn = ledger.lookup(n);
    if (!jn) throw std::invalid_argument("ledger missing J(N)");
    const double slack = std::max(1e-6 * std::abs(*jn), 1e-12);

    if (n == 1 || binding_check(ledger, n).binds) {
        out.parts = {n};
        out.trivial = true;
        return out;
    }
    // greedily split the least-margin pair until all pieces bind
    std::vector<int> stack{n};
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        if (cur == 1 || binding_check(ledger, cur).binds) {
            out.parts.push_back(cur);
            continue;
        }
        const auto v = binding_check(ledger, cur);
        stack.push_back(v.argmin_k);
        stack.push_back(cur - v.argmin_k);
    }
    std::sort(out.parts.begin(), out.parts.end());
    for (std::size_t i = 1; i < out.parts.size(); ++i) {
        if (out.parts[i] == out.parts[i - 1]) out.coefficients_ok = false;
    }
    double total = 0.0;
    for (int part : out.parts) total += *ledger.lookup(part);
    out.defect = total - *jn;
    out.consistent = out.defect > -slack;  // decomposition may not undercut J(N)
    return out;
}

}  // namespace fnls
