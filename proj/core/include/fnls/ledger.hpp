#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fnls {

struct LedgerEntry {
    double mass = 0.0;
    double J = 0.0;
    std::string provenance;
    std::string timestamp;
};

/// Table of best-known J values per mass for one (d, p), with binding-
/// inequality bookkeeping. Entries are validated on insertion: J < 0 and
/// J/mass >= e_LT(d,p) - tolerance.
class BindingLedger {
public:
    BindingLedger() = default;
    BindingLedger(int d, double p, double c_lt = 0.0);  // c_lt = 0 -> shipped default

    int dim() const { return d_; }
    double exponent() const { return p_; }
    double c_lt() const { return c_lt_; }

    /// Keeps the lower (better) J when the mass is already present.
    void record(double mass, double J, const std::string& provenance);
    std::optional<double> lookup(double mass) const;
    std::vector<LedgerEntry> entries() const;

    std::string to_json() const;
    static BindingLedger from_json(const std::string& text);

private:
    int d_ = 1;
    double p_ = 1.3;
    double c_lt_ = 0.0;
    std::map<long long, LedgerEntry> table_;  // key: round(mass * 1e9)
};

struct BindingVerdict {
    int n = 0;
    bool binds = false;
    double slack = 0.0;
    double min_margin = 0.0;
    int argmin_k = 0;
    std::vector<double> margins;  // margin[k-1] = J(k) + J(n-k) - J(n), k = 1..n-1
};

/// Binding check at integer N over the ledger; needs J(1..N). The verdict is
/// positive when every margin exceeds slack = 1e-6 |J(N)|.
BindingVerdict binding_check(const BindingLedger& ledger, int n);

/// Integers up to n_max whose binding inequalities all hold.
std::vector<int> binding_set(const BindingLedger& ledger, int n_max);

struct LedgerDecomposition {
    int n = 0;
    std::vector<int> parts;         // members of the binding set, multiplicities resolved
    bool trivial = false;           // n itself binds
    bool coefficients_ok = true;    // no binding-set member repeated
    bool consistent = true;         // decomposition energy matches J(n) within slack
    double defect = 0.0;            // sum_parts J - J(n)
};

/// Greedy decomposition of a non-binding N into binding-set members, a
/// bookkeeping device over numerical J values. Flags a numerical-accuracy
/// alarm when the decomposition energy drops below J(N) beyond slack.
LedgerDecomposition binding_set_decompose(const BindingLedger& ledger, int n);

}  // namespace fnls
