// SPDX-License-Identifier: Apache-2.0
#pragma once

// Brute-force ground truth on a rational grid. Answers are grid-relative: a
// missing instance on the grid proves nothing about the real model.

#include "errors.hpp"
#include "mc_engine.hpp"
#include "model.hpp"
#include "rational.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace pimc
{

struct grid_spec
{
    long denominator = 4;
    std::size_t max_states = 12;
    std::size_t max_params = 4;
    double budget = 5e6;

    [[nodiscard]] std::vector< rational > points() const
    {
        if ( denominator < 1 )
            throw error( "grid denominator must be at least 1" );
        std::vector< rational > out;
        for ( long k = 0; k <= denominator; ++k )
            out.push_back( make_rational( k, denominator ) );
        return out;
    }
};

struct instance
{
    valuation values;
    mc chain;
};

namespace detail
{

// Candidate probabilities for one transition: grid points inside the
// interval plus its endpoints.
inline std::vector< rational > candidates( const interval& i, const std::vector< rational >& grid )
{
    std::set< rational > out;
    if ( i.empty )
        return {};
    for ( const auto& g : grid )
        if ( i.contains( g ) )
            out.insert( g );
    out.insert( i.lo );
    out.insert( i.hi );
    return { out.begin(), out.end() };
}

struct row_slot
{
    state_index dst;
    interval allowed;
    std::vector< rational > values;
};

// All distributions over `slots` with every slot but the last taken from its
// candidates and the last one forced to the remainder.
inline void enumerate_rows( const std::vector< row_slot >& slots, std::size_t k, rational used,
                            std::vector< rational >& current,
                            const std::function< bool( const std::vector< rational >& ) >& visit, bool& stop )
{
    if ( stop )
        return;
    if ( k + 1 == slots.size() ) {
        rational rest = 1 - used;
        if ( slots[ k ].allowed.contains( rest ) ) {
            current[ k ] = rest;
            if ( !visit( current ) )
                stop = true;
        }
        return;
    }
    for ( const auto& v : slots[ k ].values ) {
        if ( used + v > 1 )
            break;
        current[ k ] = v;
        enumerate_rows( slots, k + 1, used + v, current, visit, stop );
        if ( stop )
            return;
    }
}

inline std::vector< row_slot > row_slots( const imc& i, state_index s, const std::vector< rational >& grid )
{
    std::vector< row_slot > slots;
    for ( const auto& [ d, iv ] : i.row( s ) )
        slots.push_back( { d, iv, candidates( iv, grid ) } );
    return slots;
}

// Deterministic stand-in for rows of states nobody reaches.
inline mc::row_type filler_row( const imc& i, state_index s, const std::vector< rational >& grid )
{
    auto slots = row_slots( i, s, grid );
    std::optional< mc::row_type > found;
    if ( !slots.empty() ) {
        std::vector< rational > cur( slots.size() );
        bool stop = false;
        enumerate_rows( slots, 0, rational( 0 ), cur,
                        [ & ]( const std::vector< rational >& vals ) {
                            mc::row_type r;
                            for ( std::size_t k = 0; k < slots.size(); ++k )
                                if ( vals[ k ] != 0 )
                                    r[ slots[ k ].dst ] = vals[ k ];
                            found = r;
                            return false;
                        },
                        stop );
    }
    if ( found )
        return *found;
    return { { s, rational( 1 ) } };
}

class instance_walker
{
    const imc& _i;
    const std::vector< rational >& _grid;
    const std::function< bool( const mc& ) >& _visit;
    std::vector< std::optional< mc::row_type > > _rows;
    bool _stop = false;

public:
    instance_walker( const imc& i, const std::vector< rational >& grid, const std::function< bool( const mc& ) >& visit )
        : _i{ i }, _grid{ grid }, _visit{ visit }, _rows( i.state_count() ) {}

    bool run()
    {
        step();
        return !_stop;
    }

private:
    // Lowest-index state reachable through assigned rows whose row is open.
    std::optional< state_index > open_state() const
    {
        state_set seen{ _i.initial() };
        std::vector< state_index > work{ _i.initial() };
        std::optional< state_index > best;
        while ( !work.empty() ) {
            auto s = work.back();
            work.pop_back();
            if ( !_rows[ s ] ) {
                if ( !best || s < *best )
                    best = s;
                continue;
            }
            for ( const auto& [ d, p ] : *_rows[ s ] )
                if ( p != 0 && seen.insert( d ).second )
                    work.push_back( d );
        }
        return best;
    }

    void step()
    {
        if ( _stop )
            return;
        auto s = open_state();
        if ( !s ) {
            std::vector< mc::row_type > rows( _i.state_count() );
            for ( state_index k = 0; k < _i.state_count(); ++k )
                rows[ k ] = _rows[ k ] ? *_rows[ k ] : filler_row( _i, k, _grid );
            if ( !_visit( mc( _i.names(), _i.labels(), _i.initial(), std::move( rows ) ) ) )
                _stop = true;
            return;
        }
        auto slots = row_slots( _i, *s, _grid );
        if ( slots.empty() )
            return; // a reachable state without any transition admits no distribution
        std::vector< rational > cur( slots.size() );
        bool inner_stop = false;
        enumerate_rows( slots, 0, rational( 0 ), cur,
                        [ & ]( const std::vector< rational >& vals ) {
                            mc::row_type r;
                            for ( std::size_t k = 0; k < slots.size(); ++k )
                                if ( vals[ k ] != 0 )
                                    r[ slots[ k ].dst ] = vals[ k ];
                            _rows[ *s ] = std::move( r );
                            step();
                            _rows[ *s ].reset();
                            return !_stop;
                        },
                        inner_stop );
    }
};

} // namespace detail

// Upper bound on the number of enumerated instances.
inline double enumeration_bound( const param_imc& p, const grid_spec& g )
{
    double per_value = static_cast< double >( g.denominator + 3 );
    double bound = 1;
    for ( std::size_t k = 0; k < p.params().size(); ++k )
        bound *= static_cast< double >( g.denominator + 1 );
    for ( state_index s = 0; s < p.state_count(); ++s )
        for ( std::size_t k = 1; k < p.row( s ).size(); ++k )
            bound *= per_value;
    return bound;
}

inline void check_grid_budget( const param_imc& p, const grid_spec& g )
{
    if ( p.state_count() > g.max_states )
        throw budget_exceeded( "too many states for grid enumeration", static_cast< double >( p.state_count() ) );
    if ( p.params().size() > g.max_params )
        throw budget_exceeded( "too many parameters for grid enumeration", static_cast< double >( p.params().size() ) );
    double bound = enumeration_bound( p, g );
    if ( bound > g.budget )
        throw budget_exceeded( "grid enumeration bound " + std::to_string( bound ) + " exceeds budget", bound );
}

// Visits every once-and-for-all instance on the grid; the visitor returns
// false to stop. Returns false when stopped early.
inline bool for_each_instance( const param_imc& p, const grid_spec& g,
                               const std::function< bool( const valuation&, const mc& ) >& visit )
{
    check_grid_budget( p, g );
    const auto grid = g.points();
    std::vector< std::string > names( p.params().begin(), p.params().end() );
    std::vector< std::size_t > idx( names.size(), 0 );
    while ( true ) {
        valuation v;
        for ( std::size_t k = 0; k < names.size(); ++k )
            v[ names[ k ] ] = grid[ idx[ k ] ];
        std::optional< imc > inst;
        try {
            inst = instantiate( p, v );
        } catch ( const division_by_zero& ) {
            inst.reset();
        }
        if ( inst ) {
            std::function< bool( const mc& ) > cb = [ & ]( const mc& m ) { return visit( v, m ); };
            if ( !detail::instance_walker( *inst, grid, cb ).run() )
                return false;
        }
        std::size_t k = 0;
        while ( k < idx.size() && ++idx[ k ] == grid.size() )
            idx[ k++ ] = 0;
        if ( k == idx.size() )
            break;
    }
    return true;
}

inline std::vector< instance > enum_instances( const param_imc& p, const grid_spec& g )
{
    std::vector< instance > out;
    for_each_instance( p, g, [ & ]( const valuation& v, const mc& m ) {
        out.push_back( { v, m } );
        return true;
    } );
    return out;
}

inline std::optional< instance > brute_consistency( const param_imc& p, const grid_spec& g )
{
    std::optional< instance > found;
    for_each_instance( p, g, [ & ]( const valuation& v, const mc& m ) {
        found = instance{ v, m };
        return false;
    } );
    return found;
}

struct reach_bounds
{
    rational min;
    rational max;
    instance argmin;
    instance argmax;
    std::size_t instances = 0;
};

inline reach_bounds brute_reach_bounds( const param_imc& p, const label& target, const grid_spec& g,
                                        label_match mode = label_match::exact )
{
    std::optional< reach_bounds > out;
    const state_set goal = states_with_label( p, target, mode );
    for_each_instance( p, g, [ & ]( const valuation& v, const mc& m ) {
        rational r = reach_prob( m, m.initial(), goal );
        if ( !out ) {
            out = reach_bounds{ r, r, { v, m }, { v, m }, 0 };
        } else {
            if ( r < out->min ) {
                out->min = r;
                out->argmin = { v, m };
            }
            if ( r > out->max ) {
                out->max = r;
                out->argmax = { v, m };
            }
        }
        ++out->instances;
        return true;
    } );
    if ( !out )
        throw error( "inconsistent on grid" );
    return *out;
}

struct path_sum
{
    rational lower;
    rational residual;
};

// First-hit path mass up to `depth` steps, and the mass still alive (neither
// absorbed by the target nor stuck where the target is unreachable).
inline path_sum truncated_path_sum( const mc& m, state_index from, const state_set& target, std::size_t depth )
{
    m.check_state( from );
    if ( target.count( from ) )
        return { rational( 1 ), rational( 0 ) };
    auto part = partition_for( m, target );
    std::map< state_index, rational > live{ { from, rational( 1 ) } };
    rational hit( 0 );
    for ( std::size_t k = 0; k < depth; ++k ) {
        std::map< state_index, rational > next;
        for ( const auto& [ s, mass ] : live )
            for ( const auto& [ d, p ] : m.row( s ) ) {
                if ( p == 0 )
                    continue;
                if ( target.count( d ) )
                    hit += mass * p;
                else if ( !part.bot.count( d ) )
                    next[ d ] += mass * p;
            }
        live = std::move( next );
    }
    rational residual( 0 );
    for ( const auto& [ _, mass ] : live )
        residual += mass;
    return { hit, residual };
}

} // namespace pimc
