// SPDX-License-Identifier: Apache-2.0
#pragma once

// At-every-step satisfaction between an MC (states t) and an IMC (states s),
// plus the constructions that turn an implementation into degree-1 and
// same-structure ones.

#include "errors.hpp"
#include "lp.hpp"
#include "mc_engine.hpp"
#include "model.hpp"
#include "oracle.hpp"
#include "rational.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace pimc
{

using state_pair = std::pair< state_index, state_index >; // (t, s)

// delta(t')(s')
using correspondence = std::map< state_index, std::map< state_index, rational > >;

struct sat_relation
{
    std::set< state_pair > pairs;
    std::map< state_pair, correspondence > deltas;

    [[nodiscard]] bool contains( state_index t, state_index s ) const { return pairs.count( { t, s } ) != 0; }

    [[nodiscard]] std::set< state_index > image( state_index t ) const
    {
        std::set< state_index > out;
        for ( auto it = pairs.lower_bound( { t, 0 } ); it != pairs.end() && it->first == t; ++it )
            out.insert( it->second );
        return out;
    }

    [[nodiscard]] std::set< state_index > preimage( state_index s ) const
    {
        std::set< state_index > out;
        for ( const auto& [ t, x ] : pairs )
            if ( x == s )
                out.insert( t );
        return out;
    }
};

inline std::size_t degree( const sat_relation& r )
{
    std::map< state_index, std::size_t > count;
    std::size_t best = 0;
    for ( const auto& [ t, _ ] : r.pairs )
        best = std::max( best, ++count[ t ] );
    return best;
}

struct aes_check
{
    bool ok = false;
    std::string clause; // "init", "label", "a", "b" or "c"
    std::optional< state_pair > pair;
    std::string detail;
};

// Verifies every clause of the relation; a pair without a stored delta is an
// error rather than a failed check.
inline aes_check check_aes( const mc& m, const imc& i, const sat_relation& r )
{
    if ( !r.contains( m.initial(), i.initial() ) )
        return { false, "init", std::nullopt, "initial pair missing" };
    for ( const auto& pr : r.pairs ) {
        const auto [ t, s ] = pr;
        m.check_state( t );
        i.check_state( s );
        if ( m.labels_of( t ) != i.labels_of( s ) )
            return { false, "label", pr, "labels differ" };
        auto found = r.deltas.find( pr );
        if ( found == r.deltas.end() )
            throw error( "no correspondence function for (" + m.name( t ) + ", " + i.name( s ) + ")" );
        const correspondence& delta = found->second;

        for ( const auto& [ t2, p ] : m.row( t ) ) {
            if ( p <= 0 )
                continue;
            rational sum( 0 );
            if ( auto row = delta.find( t2 ); row != delta.end() )
                for ( const auto& [ s2, x ] : row->second ) {
                    if ( x < 0 || x > 1 )
                        return { false, "a", pr, "delta(" + m.name( t2 ) + ") leaves [0,1]" };
                    sum += x;
                }
            if ( sum != 1 )
                return { false, "a", pr, "delta(" + m.name( t2 ) + ") sums to " + to_string( sum ) };
        }

        std::map< state_index, rational > column;
        for ( const auto& [ t2, p ] : m.row( t ) )
            if ( auto row = delta.find( t2 ); row != delta.end() )
                for ( const auto& [ s2, x ] : row->second )
                    column[ s2 ] += p * x;
        for ( state_index s2 = 0; s2 < i.state_count(); ++s2 ) {
            const interval* iv = i.find( s, s2 );
            interval allowed = iv ? *iv : interval::point( 0 );
            rational value = column.count( s2 ) ? column[ s2 ] : rational( 0 );
            if ( !allowed.contains( value ) )
                return { false, "b", pr, "mass " + to_string( value ) + " into " + i.name( s2 ) + " outside interval" };
        }

        for ( const auto& [ t2, row ] : delta )
            for ( const auto& [ s2, x ] : row )
                if ( x > 0 && !r.contains( t2, s2 ) )
                    return { false, "c", pr, "delta uses unrelated pair (" + m.name( t2 ) + ", " + i.name( s2 ) + ")" };
    }
    return { true, "", std::nullopt, "" };
}

// Correspondence function for (t, s) using only pairs in `pairs`, found by an
// exact LP; nullopt when none exists.
inline std::optional< correspondence > find_delta( const mc& m, const imc& i, const std::set< state_pair >& pairs,
                                                   state_index t, state_index s )
{
    std::vector< state_pair > vars;
    std::map< state_index, rational > weight;
    for ( const auto& [ t2, p ] : m.row( t ) ) {
        if ( p <= 0 )
            continue;
        weight[ t2 ] = p;
        bool any = false;
        for ( auto it = pairs.lower_bound( { t2, 0 } ); it != pairs.end() && it->first == t2; ++it ) {
            vars.push_back( *it );
            any = true;
        }
        if ( !any )
            return std::nullopt;
    }

    feasibility_problem lp( vars.size() );
    for ( const auto& [ t2, _ ] : weight ) {
        std::map< std::size_t, rational > row;
        for ( std::size_t k = 0; k < vars.size(); ++k )
            if ( vars[ k ].first == t2 )
                row[ k ] = 1;
        lp.add( row, relation::eq, rational( 1 ) );
    }
    for ( state_index s2 = 0; s2 < i.state_count(); ++s2 ) {
        const interval* iv = i.find( s, s2 );
        interval allowed = iv ? *iv : interval::point( 0 );
        if ( allowed.empty )
            return std::nullopt;
        std::map< std::size_t, rational > row;
        for ( std::size_t k = 0; k < vars.size(); ++k )
            if ( vars[ k ].second == s2 )
                row[ k ] = weight[ vars[ k ].first ];
        if ( row.empty() ) {
            if ( !allowed.contains( rational( 0 ) ) )
                return std::nullopt;
            continue;
        }
        if ( allowed.lo > 0 )
            lp.add( row, relation::ge, allowed.lo );
        lp.add( row, relation::le, allowed.hi );
    }

    auto x = lp.solve();
    if ( !x )
        return std::nullopt;
    correspondence delta;
    for ( std::size_t k = 0; k < vars.size(); ++k )
        if ( ( *x )[ k ] != 0 )
            delta[ vars[ k ].first ][ vars[ k ].second ] = ( *x )[ k ];
    for ( const auto& [ t2, _ ] : weight )
        delta[ t2 ]; // keep an explicit (possibly empty) row for every successor
    return delta;
}

// Greatest fixpoint: start from all label-equal pairs and drop pairs without a
// correspondence function until stable.
inline std::optional< sat_relation > decide_aes( const mc& m, const imc& i )
{
    std::set< state_pair > pairs;
    for ( state_index t = 0; t < m.state_count(); ++t )
        for ( state_index s = 0; s < i.state_count(); ++s )
            if ( m.labels_of( t ) == i.labels_of( s ) )
                pairs.insert( { t, s } );
    bool changed = true;
    while ( changed ) {
        changed = false;
        for ( auto it = pairs.begin(); it != pairs.end(); ) {
            if ( !find_delta( m, i, pairs, it->first, it->second ) ) {
                it = pairs.erase( it );
                changed = true;
            } else {
                ++it;
            }
        }
    }
    if ( !pairs.count( { m.initial(), i.initial() } ) )
        return std::nullopt;
    sat_relation out;
    out.pairs = pairs;
    for ( const auto& pr : pairs )
        out.deltas[ pr ] = *find_delta( m, i, pairs, pr.first, pr.second );
    return out;
}

// Degree-1 relation where every successor t' of a related state maps to its
// unique image f(t').
inline sat_relation functional_relation( const mc& m, const std::map< state_index, state_index >& f )
{
    sat_relation r;
    for ( const auto& [ t, s ] : f )
        r.pairs.insert( { t, s } );
    for ( const auto& [ t, s ] : f ) {
        correspondence delta;
        for ( const auto& [ t2, p ] : m.row( t ) ) {
            if ( p <= 0 )
                continue;
            auto it = f.find( t2 );
            if ( it != f.end() )
                delta[ t2 ][ it->second ] = 1;
            else
                delta[ t2 ];
        }
        r.deltas[ { t, s } ] = std::move( delta );
    }
    return r;
}

struct relabeled_chain
{
    mc chain;
    sat_relation relation; // degree 1, between `chain` and the IMC
    std::map< state_index, state_index > image; // state of `chain` -> IMC state
};

// One state u_t^s per related pair, p'(u_t^s)(u_t'^s') = p(t)(t') * delta_t^s(t')(s').
inline relabeled_chain split_degree1( const mc& m, const imc& i, const sat_relation& r )
{
    auto verdict = check_aes( m, i, r );
    if ( !verdict.ok )
        throw error( "split_degree1 needs a valid relation (clause " + verdict.clause + ": " + verdict.detail + ")" );
    std::map< state_pair, state_index > index;
    std::vector< std::string > names;
    std::vector< label > labels;
    std::map< state_index, state_index > image;
    for ( const auto& pr : r.pairs ) {
        index[ pr ] = names.size();
        image[ names.size() ] = pr.second;
        names.push_back( m.name( pr.first ) + "_" + i.name( pr.second ) );
        labels.push_back( m.labels_of( pr.first ) );
    }
    std::vector< mc::row_type > rows( names.size() );
    for ( const auto& pr : r.pairs ) {
        const auto& delta = r.deltas.at( pr );
        auto& row = rows[ index[ pr ] ];
        for ( const auto& [ t2, p ] : m.row( pr.first ) ) {
            auto d = delta.find( t2 );
            if ( p <= 0 || d == delta.end() )
                continue;
            for ( const auto& [ s2, x ] : d->second )
                if ( x > 0 )
                    row[ index.at( { t2, s2 } ) ] += p * x;
        }
    }
    mc out( names, labels, index.at( { m.initial(), i.initial() } ), std::move( rows ) );
    sat_relation rel = functional_relation( out, image );
    return { std::move( out ), std::move( rel ), std::move( image ) };
}

enum class extremum { min, max };

// Same structure: no IMC state has two related MC states (degree 1 assumed).
inline bool same_structure( const sat_relation& r )
{
    std::set< state_index > seen;
    for ( const auto& [ _, s ] : r.pairs )
        if ( !seen.insert( s ).second )
            return false;
    return degree( r ) <= 1;
}

struct merge_step
{
    relabeled_chain result;
    bool changed = false;
};

// Merges the preimages of the lowest IMC state having several into the one
// with extremal probability of reaching `target` (lowest index on ties),
// redirecting incoming transitions. The new relation is re-checked.
inline merge_step merge_extremal( const mc& m, const imc& i, const sat_relation& r, const label& target,
                                  extremum mode, label_match match = label_match::exact )
{
    if ( degree( r ) > 1 )
        throw error( "merge_extremal needs a degree-1 relation" );
    std::map< state_index, state_index > f;
    for ( const auto& [ t, s ] : r.pairs )
        f[ t ] = s;
    std::optional< state_index > chosen;
    for ( state_index s = 0; s < i.state_count() && !chosen; ++s )
        if ( r.preimage( s ).size() >= 2 )
            chosen = s;
    if ( !chosen )
        return { { m, r, f }, false };

    auto pre = r.preimage( *chosen );
    auto probs = reach_probabilities( m, states_with_label( m, target, match ) );
    state_index keep = *pre.begin();
    for ( auto t : pre ) {
        bool better = mode == extremum::min ? probs[ t ] < probs[ keep ] : probs[ t ] > probs[ keep ];
        if ( better )
            keep = t;
    }

    std::map< state_index, state_index > renumber;
    std::vector< std::string > names;
    std::vector< label > labels;
    for ( state_index t = 0; t < m.state_count(); ++t ) {
        if ( pre.count( t ) && t != keep )
            continue;
        renumber[ t ] = names.size();
        names.push_back( m.name( t ) );
        labels.push_back( m.labels_of( t ) );
    }
    auto target_of = [ & ]( state_index t ) { return pre.count( t ) ? renumber.at( keep ) : renumber.at( t ); };
    std::vector< mc::row_type > rows( names.size() );
    for ( const auto& [ t, k ] : renumber )
        for ( const auto& [ d, p ] : m.row( t ) )
            rows[ k ][ target_of( d ) ] += p;
    mc out( names, labels, target_of( m.initial() ), std::move( rows ) );

    std::map< state_index, state_index > g;
    for ( const auto& [ t, s ] : f )
        if ( renumber.count( t ) )
            g[ renumber.at( t ) ] = s;
    sat_relation rel = functional_relation( out, g );
    auto verdict = check_aes( out, i, rel );
    if ( !verdict.ok )
        throw error( "merged chain lost the satisfaction relation (clause " + verdict.clause + ": " + verdict.detail + ")" );
    return { { std::move( out ), std::move( rel ), std::move( g ) }, true };
}

// Iterates merge_extremal until the chain has the same structure as i.
inline relabeled_chain merge_to_same_structure( const mc& m, const imc& i, const sat_relation& r, const label& target,
                                                extremum mode, label_match match = label_match::exact )
{
    std::map< state_index, state_index > f;
    for ( const auto& [ t, s ] : r.pairs )
        f[ t ] = s;
    relabeled_chain cur{ m, r, f };
    while ( true ) {
        auto step = merge_extremal( cur.chain, i, cur.relation, target, mode, match );
        if ( !step.changed )
            return cur;
        cur = std::move( step.result );
    }
}

// Extremal reachability over once-and-for-all implementations, on the grid.
inline rational extremal_ofa_bounds( const imc& i, const label& target, extremum mode, const grid_spec& g = {},
                                     label_match match = label_match::exact )
{
    auto bounds = brute_reach_bounds( to_param_imc( i ), target, g, match );
    return mode == extremum::min ? bounds.min : bounds.max;
}

} // namespace pimc
