#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "teich/errors.hpp"
#include "teich/fuchsian.hpp"
#include "teich/moebius.hpp"
#include "teich/words.hpp"

namespace teich {

struct CuffSlot {
    bool cusp = false;
    double length = 0.0;  // ignored for cusps

    static CuffSlot make_cusp() { return {true, 0.0}; }
    static CuffSlot make_cuff(double l) { return {false, l}; }
};

struct Gluing {
    int from_pants, from_slot;
    int to_pants, to_slot;
    double twist = 0.0;
};

struct PantsDecomposition {
    std::vector<std::array<CuffSlot, 3>> pants;
    std::vector<Gluing> gluings;
};

inline void validate_decomposition(const PantsDecomposition& pd) {
    if (pd.pants.empty()) fail(errc::invalid_gluing, "no pants in decomposition");
    for (const auto& p : pd.pants)
        for (const auto& c : p)
            if (!c.cusp && !(c.length > 0))
                fail(errc::invalid_gluing, "cuff length must be positive");
    std::vector<std::array<int, 3>> used(pd.pants.size(), {0, 0, 0});
    for (size_t gi = 0; gi < pd.gluings.size(); ++gi) {
        const Gluing& g = pd.gluings[gi];
        auto check_slot = [&](int p, int s) {
            if (p < 0 || p >= static_cast<int>(pd.pants.size()) || s < 0 || s > 2)
                fail(errc::invalid_gluing, "gluing " + std::to_string(gi) +
                                               " references slot (" + std::to_string(p) + "," +
                                               std::to_string(s) + ") out of range");
            if (pd.pants[p][s].cusp)
                fail(errc::invalid_gluing, "gluing " + std::to_string(gi) + " attaches to cusp (" +
                                               std::to_string(p) + "," + std::to_string(s) + ")");
        };
        check_slot(g.from_pants, g.from_slot);
        check_slot(g.to_pants, g.to_slot);
        if (g.from_pants == g.to_pants && g.from_slot == g.to_slot)
            fail(errc::invalid_gluing, "gluing " + std::to_string(gi) + " pairs a slot with itself");
        if (pd.pants[g.from_pants][g.from_slot].length != pd.pants[g.to_pants][g.to_slot].length)
            fail(errc::invalid_gluing,
                 "gluing " + std::to_string(gi) + " pairs cuffs of unequal length (" +
                     std::to_string(pd.pants[g.from_pants][g.from_slot].length) + " vs " +
                     std::to_string(pd.pants[g.to_pants][g.to_slot].length) + ")");
        used[g.from_pants][g.from_slot]++;
        used[g.to_pants][g.to_slot]++;
    }
    for (size_t p = 0; p < pd.pants.size(); ++p)
        for (int s = 0; s < 3; ++s) {
            int n = used[p][s];
            bool cusp = pd.pants[p][s].cusp;
            if (!cusp && n != 1)
                fail(errc::invalid_gluing, "slot (" + std::to_string(p) + "," + std::to_string(s) +
                                               ") " + (n == 0 ? "is left unglued" : "is glued twice"));
        }
    // Connectivity of the pants adjacency graph.
    std::vector<int> comp(pd.pants.size());
    for (size_t i = 0; i < comp.size(); ++i) comp[i] = static_cast<int>(i);
    auto find = [&](int x) { while (comp[x] != x) x = comp[x] = comp[comp[x]]; return x; };
    for (const Gluing& g : pd.gluings) comp[find(g.from_pants)] = find(g.to_pants);
    for (size_t i = 0; i < comp.size(); ++i)
        if (find(static_cast<int>(i)) != find(0))
            fail(errc::invalid_gluing, "pants adjacency graph is not connected");
}

namespace detail {

// Reflection z -> M(conj z) with det(M) = -1; products of two of these are
// orientation-preserving with det +1.
struct Reflection {
    double a, b, c, d;

    static Reflection vertical(double x0) { return {-1.0, 2.0 * x0, 0.0, 1.0}; }

    static Reflection circle(double p, double q) {
        double r = q - p;
        return {(p + q) / r, -2.0 * p * q / r, 2.0 / r, -(p + q) / r};
    }
};

inline Moebius compose(const Reflection& r1, const Reflection& r2) {
    // r1 after r2; conjugations cancel since entries are real.
    return Moebius(r1.a * r2.a + r1.b * r2.c, r1.a * r2.b + r1.b * r2.d,
                   r1.c * r2.a + r1.d * r2.c, r1.c * r2.b + r1.d * r2.d);
}

// Holonomy of one hyperbolic pair of pants with boundary traces
// 2*cosh(l_i/2) (2 for cusps): X1*X2*X3 = Id, X_i = product of reflections
// in three pairwise disjoint lines L1: x=0, L2, L3. Tangent lines make the
// corresponding boundary parabolic, so cusps need no special treatment
// beyond line placement.
inline std::array<Moebius, 3> pants_matrices(const std::array<CuffSlot, 3>& cuffs) {
    auto ch = [](const CuffSlot& s) { return s.cusp ? 1.0 : std::cosh(s.length / 2.0); };
    double c1 = ch(cuffs[0]), c2 = ch(cuffs[1]), c3 = ch(cuffs[2]);

    double a = (c1 - 1.0) / (c1 + 1.0);  // L2 = circle over (a, 1); a = 0 at a cusp
    Reflection r1 = Reflection::vertical(0.0);
    Reflection r2 = Reflection::circle(a, 1.0);
    Reflection r3{};
    if (cuffs[2].cusp) {
        // L3 vertical, tangent to L1 at infinity.
        double x3 = (c2 * (1.0 - a) + a + 1.0) / 2.0;
        r3 = Reflection::vertical(x3);
    } else {
        // L3 = circle over (c, kc); the larger quadratic root keeps it to
        // the right of L2 (tangent exactly when slot 2 is a cusp).
        double k = (c3 + 1.0) / (c3 - 1.0);
        double B = (a + 1.0) * (1.0 + k) + c2 * (1.0 - a) * (k - 1.0);
        double disc = B * B - 16.0 * k * a;
        double c = (B + std::sqrt(std::max(disc, 0.0))) / (4.0 * k);
        r3 = Reflection::circle(c, k * c);
    }
    return {compose(r1, r2), compose(r2, r3), compose(r3, r1)};
}

inline BoundaryPoint fixed_point_witness(const Moebius& m) {
    return m.classify(1e-9) == ElementClass::Hyperbolic ? m.sink() : m.parabolic_fixed_point();
}

inline Word substitute_generator(const Word& w, int gen, const Word& replacement) {
    Word out;
    for (int k = 0; k < w.size(); ++k) {
        if (w.index(k) == gen) {
            Word r = w.inverted(k) ? replacement.inverse() : replacement;
            for (int j = 0; j < r.size(); ++j)
                out.push(static_cast<int8_t>(r.inverted(j) ? -(r.index(j) + 1) : (r.index(j) + 1)));
        } else {
            out.push_generator(w.index(k), w.inverted(k));
        }
    }
    return out;
}

} // namespace detail

// Assemble the holonomy representation of the glued surface. Generators are
// named A, B, C, ... in a deterministic order; cusp slots become peripheral
// words; each gluing leaves a twist mark for later deformation.
inline GroupRepresentation build_representation(const PantsDecomposition& pd) {
    validate_decomposition(pd);
    const int P = static_cast<int>(pd.pants.size());

    struct GenInfo {
        Moebius mat;
        int anchor_pants;  // component membership follows this pants
        bool live = true;
    };
    std::vector<GenInfo> gens;

    struct SlotInfo {
        bool cusp;
        Word word;  // oriented so the pants lies left of the cuff axis
    };
    std::vector<std::array<SlotInfo, 3>> slots(P);

    // Per-pants generators and slot words.
    for (int p = 0; p < P; ++p) {
        auto X = detail::pants_matrices(pd.pants[p]);
        int g1 = static_cast<int>(gens.size());
        gens.push_back({X[0], p});
        gens.push_back({X[1], p});
        Word w1 = Word::generator(g1);
        Word w2 = Word::generator(g1 + 1);
        std::array<Word, 3> words = {w1, w2, (w1 * w2).inverse()};
        for (int s = 0; s < 3; ++s) {
            slots[p][s].cusp = pd.pants[p][s].cusp;
            Word w = words[s];
            if (!slots[p][s].cusp) {
                // Orient pants-left: a fixed point of another boundary
                // element always lies on the pants' side of the cuff axis.
                const Moebius& m = X[s];
                BoundaryPoint witness = detail::fixed_point_witness(X[(s + 1) % 3]);
                if (circular_order(m.source(), m.sink(), witness) != Orientation::Positive)
                    w = w.inverse();
            }
            slots[p][s].word = w;
        }
    }

    auto eval = [&](const Word& w) {
        Moebius m;
        for (int k = 0; k < w.size(); ++k)
            m = m * (w.inverted(k) ? gens[w.index(k)].mat.inverse() : gens[w.index(k)].mat);
        return m;
    };

    // Union-find over pants.
    std::vector<int> uf(P);
    for (int i = 0; i < P; ++i) uf[i] = i;
    auto find = [&](int x) { while (uf[x] != x) x = uf[x] = uf[uf[x]]; return x; };

    auto substitute_all = [&](int gen, const Word& repl) {
        for (auto& ps : slots)
            for (auto& sl : ps) sl.word = detail::substitute_generator(sl.word, gen, repl);
    };

    std::vector<Word> relators;

    struct EdgeInfo {
        bool tree;
        int a_pants, b_pants;
        int stable_gen = -1;  // HNN edges
        Word cuff;            // from-side cuff word (kept side)
    };
    std::vector<EdgeInfo> edges;

    for (const Gluing& g : pd.gluings) {
        SlotInfo& sa = slots[g.from_pants][g.from_slot];
        SlotInfo& sb = slots[g.to_pants][g.to_slot];
        Moebius ma = eval(sa.word), mb = eval(sb.word);
        BoundaryPoint a_src = ma.source(), a_snk = ma.sink();
        BoundaryPoint b_src = mb.source(), b_snk = mb.sink();

        // C0 carries the b-axis onto the a-axis reversing direction, so the
        // glued sides land opposite each other; T adds the twist.
        Moebius flip(0.0, -1.0, 1.0, 0.0);
        Moebius c0 = axis_to_standard(a_src, a_snk).inverse() * flip *
                     axis_to_standard(b_src, b_snk);
        Moebius conj = axis_translation(a_src, a_snk, g.twist) * c0;

        EdgeInfo edge;
        edge.a_pants = g.from_pants;
        edge.b_pants = g.to_pants;

        Word relator;
        std::vector<char> q_member(gens.size(), 0);
        if (find(g.from_pants) != find(g.to_pants)) {
            // Amalgam: conjugate the joining component into place.
            edge.tree = true;
            int qc = find(g.to_pants);
            for (size_t i = 0; i < gens.size(); ++i)
                if (gens[i].live && find(gens[i].anchor_pants) == qc) {
                    q_member[i] = 1;
                    gens[i].mat = conj * gens[i].mat * conj.inverse();
                }
            uf[qc] = find(g.from_pants);
            relator = sa.word * sb.word;
        } else {
            // HNN: new stable letter conjugating one cuff to the other.
            edge.tree = false;
            edge.stable_gen = static_cast<int>(gens.size());
            gens.push_back({conj, g.from_pants});
            Word t = Word::generator(edge.stable_gen);
            relator = t * sb.word * t.inverse() * sa.word;
        }

        // Solve the cuff relation for a generator occurring exactly once,
        // if there is one; otherwise keep it as a relator (closed surfaces).
        // Generators of the newly attached component go first.
        int elim = -1, elim_pos = -1;
        for (int pass = 0; pass < 2 && elim < 0; ++pass) {
            for (int k = 0; k < relator.size(); ++k) {
                int gi = relator.index(k);
                if (gi == edge.stable_gen) continue;
                if (pass == 0 && !(edge.tree ? q_member[gi] != 0 : true)) continue;
                int count = 0;
                for (int j = 0; j < relator.size(); ++j)
                    if (relator.index(j) == gi) ++count;
                if (count == 1) { elim = gi; elim_pos = k; break; }
            }
            if (edge.tree == false) break;  // one pass suffices for HNN edges
        }
        if (elim >= 0) {
            Word prefix, suffix;
            for (int k = 0; k < elim_pos; ++k)
                prefix.push_generator(relator.index(k), relator.inverted(k));
            for (int k = elim_pos + 1; k < relator.size(); ++k)
                suffix.push_generator(relator.index(k), relator.inverted(k));
            Word repl = prefix.inverse() * suffix.inverse();
            if (relator.inverted(elim_pos)) repl = repl.inverse();
            double defect = eval(repl).distance(gens[elim].mat);
            if (defect > 1e-6)
                fail(errc::invalid_gluing, "cuff relation defect " + std::to_string(defect) +
                                               " while eliminating a generator");
            gens[elim].live = false;
            substitute_all(elim, repl);
            for (Word& r : relators) r = detail::substitute_generator(r, elim, repl);
            for (EdgeInfo& e : edges) e.cuff = detail::substitute_generator(e.cuff, elim, repl);
        } else {
            relators.push_back(relator);
        }
        edge.cuff = slots[g.from_pants][g.from_slot].word;
        edges.push_back(edge);
    }

    // Compact live generators and rename A, B, C, ...
    std::vector<int> remap(gens.size(), -1);
    GroupRepresentation rep;
    for (size_t i = 0; i < gens.size(); ++i) {
        if (!gens[i].live) continue;
        remap[i] = static_cast<int>(rep.images.size());
        int n = remap[i];
        rep.generator_names.push_back(n < 26 ? std::string(1, static_cast<char>('A' + n))
                                             : "g" + std::to_string(n));
        rep.images.push_back(gens[i].mat);
    }
    auto remap_word = [&](const Word& w) {
        Word out;
        for (int k = 0; k < w.size(); ++k) {
            int m = remap[w.index(k)];
            if (m < 0) fail(errc::invalid_gluing, "internal: word references dead generator");
            out.push_generator(m, w.inverted(k));
        }
        return out;
    };

    for (int p = 0; p < P; ++p)
        for (int s = 0; s < 3; ++s)
            if (slots[p][s].cusp) rep.peripheral_words.push_back(remap_word(slots[p][s].word));
    for (const Word& r : relators) rep.relators.push_back(remap_word(r));

    // Twist marks. For a tree edge the moved side is the subtree of the
    // gluing tree beyond its b-pants; stable letters of edges crossing the
    // cut are multiplied on the matching side.
    std::vector<std::vector<std::pair<int, int>>> tree_adj(P);  // (edge, neighbour)
    for (size_t e = 0; e < edges.size(); ++e)
        if (edges[e].tree) {
            tree_adj[edges[e].a_pants].push_back({static_cast<int>(e), edges[e].b_pants});
            tree_adj[edges[e].b_pants].push_back({static_cast<int>(e), edges[e].a_pants});
        }
    for (size_t e = 0; e < edges.size(); ++e) {
        GroupRepresentation::TwistMark mark;
        mark.cuff = remap_word(edges[e].cuff);
        if (!edges[e].tree) {
            mark.left_mult.push_back(remap[edges[e].stable_gen]);
        } else {
            std::vector<char> moved(P, 0);
            std::deque<int> queue{edges[e].b_pants};
            moved[edges[e].b_pants] = 1;
            while (!queue.empty()) {
                int p = queue.front();
                queue.pop_front();
                for (auto [ei, q] : tree_adj[p])
                    if (ei != static_cast<int>(e) && !moved[q]) { moved[q] = 1; queue.push_back(q); }
            }
            for (size_t i = 0; i < gens.size(); ++i)
                if (gens[i].live && remap[i] >= 0) {
                    bool is_stable = false;
                    for (const EdgeInfo& o : edges)
                        if (o.stable_gen == static_cast<int>(i)) {
                            is_stable = true;
                            bool am = moved[o.a_pants], bm = moved[o.b_pants];
                            if (am && bm) mark.movers.push_back(remap[i]);
                            else if (am) mark.left_mult.push_back(remap[i]);
                            else if (bm) mark.right_mult.push_back(remap[i]);
                        }
                    if (!is_stable && moved[gens[i].anchor_pants]) mark.movers.push_back(remap[i]);
                }
        }
        rep.twist_marks.push_back(mark);
    }

    // Canonical position: first glued cuff's axis on the imaginary axis.
    if (!rep.twist_marks.empty()) {
        Moebius m = evaluate_word(rep, rep.twist_marks.front().cuff);
        Moebius n = axis_to_standard(m.source(), m.sink());
        for (Moebius& img : rep.images) img = n * img * n.inverse();
    }

    double rd = relator_defect(rep);
    if (rd > 1e-7)
        fail(errc::invalid_gluing, "assembled relator defect " + std::to_string(rd));
    return rep;
}

// Fenchel-Nielsen twist deformation along a marked cuff by hyperbolic
// length delta_tau. A full twist (delta_tau equal to the cuff length)
// realizes the Dehn twist along that cuff up to conjugation.
inline GroupRepresentation twist_deform(const GroupRepresentation& rep, const Word& cuff_word,
                                        double delta_tau) {
    const GroupRepresentation::TwistMark* mark = nullptr;
    for (const auto& m : rep.twist_marks)
        if (m.cuff == cuff_word) { mark = &m; break; }
    if (!mark)
        fail(errc::unknown_cuff,
             "no twist mark for cuff '" + rep.format(cuff_word) + "'");
    Moebius m = evaluate_word(rep, cuff_word);
    if (m.classify(1e-9) != ElementClass::Hyperbolic)
        fail(errc::not_hyperbolic, "cuff word does not evaluate to a hyperbolic element");
    Moebius t = axis_translation(m.source(), m.sink(), delta_tau);
    GroupRepresentation out = rep;
    for (int g : mark->movers) out.images[g] = t * out.images[g] * t.inverse();
    for (int g : mark->left_mult) out.images[g] = t * out.images[g];
    for (int g : mark->right_mult) out.images[g] = out.images[g] * t.inverse();
    return out;
}

} // namespace teich
