// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "errors.hpp"
#include "model.hpp"
#include "rational.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace pimc
{

// Probability of a finite state sequence; 0 as soon as a step is impossible.
inline rational path_prob( const mc& m, const std::vector< state_index >& path )
{
    if ( path.empty() )
        throw error( "empty path" );
    for ( auto s : path )
        m.check_state( s );
    rational acc( 1 );
    for ( std::size_t i = 0; i + 1 < path.size(); ++i ) {
        const auto* p = m.find( path[ i ], path[ i + 1 ] );
        if ( !p || *p == 0 )
            return rational( 0 );
        acc *= *p;
    }
    return acc;
}

struct reach_partition
{
    state_set top;  // reach the target with probability 1
    state_set bot;  // cannot reach the target
    state_set maybe;
};

namespace detail
{

// States that can reach `goal` through states outside `blocked` (goal states
// themselves always count).
inline state_set backward_closure( const std::vector< state_set >& preds, const state_set& goal,
                                   const state_set& blocked = {} )
{
    state_set seen = goal;
    std::deque< state_index > work( goal.begin(), goal.end() );
    while ( !work.empty() ) {
        auto s = work.front();
        work.pop_front();
        for ( auto q : preds[ s ] )
            if ( !blocked.count( q ) && seen.insert( q ).second )
                work.push_back( q );
    }
    return seen;
}

// Solves a x = b in place by Gauss-Jordan elimination; the pivot of each
// column is the entry of largest magnitude (first one on ties).
inline std::vector< rational > solve_linear( std::vector< std::vector< rational > > a, std::vector< rational > b )
{
    const std::size_t n = b.size();
    for ( std::size_t col = 0; col < n; ++col ) {
        std::size_t piv = col;
        for ( std::size_t r = col + 1; r < n; ++r )
            if ( abs( a[ r ][ col ] ) > abs( a[ piv ][ col ] ) )
                piv = r;
        if ( a[ piv ][ col ] == 0 )
            throw error( "singular reachability system" );
        std::swap( a[ piv ], a[ col ] );
        std::swap( b[ piv ], b[ col ] );
        const rational inv = 1 / a[ col ][ col ];
        for ( std::size_t c = col; c < n; ++c )
            a[ col ][ c ] *= inv;
        b[ col ] *= inv;
        for ( std::size_t r = 0; r < n; ++r ) {
            if ( r == col || a[ r ][ col ] == 0 )
                continue;
            const rational f = a[ r ][ col ];
            for ( std::size_t c = col; c < n; ++c )
                a[ r ][ c ] -= f * a[ col ][ c ];
            b[ r ] -= f * b[ col ];
        }
    }
    return b;
}

} // namespace detail

inline reach_partition partition_for( const mc& m, const state_set& target )
{
    for ( auto t : target )
        m.check_state( t );
    auto preds = pred_sets( m );
    reach_partition out;
    state_set can_reach = detail::backward_closure( preds, target );
    for ( state_index s = 0; s < m.state_count(); ++s )
        if ( !can_reach.count( s ) )
            out.bot.insert( s );
    // A state misses the target with positive probability iff it can reach
    // S_bot without passing through the target.
    state_set may_fail = detail::backward_closure( preds, out.bot, target );
    for ( state_index s = 0; s < m.state_count(); ++s ) {
        if ( target.count( s ) || !may_fail.count( s ) )
            out.top.insert( s );
        else if ( !out.bot.count( s ) )
            out.maybe.insert( s );
    }
    return out;
}

// Reachability probability of `target` from every state.
inline std::vector< rational > reach_probabilities( const mc& m, const state_set& target )
{
    auto part = partition_for( m, target );
    std::vector< rational > out( m.state_count() );
    for ( auto s : part.top )
        out[ s ] = 1;
    std::vector< state_index > order( part.maybe.begin(), part.maybe.end() );
    if ( order.empty() )
        return out;
    std::map< state_index, std::size_t > pos;
    for ( std::size_t i = 0; i < order.size(); ++i )
        pos[ order[ i ] ] = i;
    const std::size_t n = order.size();
    std::vector< std::vector< rational > > a( n, std::vector< rational >( n ) );
    std::vector< rational > b( n );
    for ( std::size_t i = 0; i < n; ++i ) {
        a[ i ][ i ] = 1;
        for ( const auto& [ d, p ] : m.row( order[ i ] ) ) {
            if ( part.top.count( d ) )
                b[ i ] += p;
            else if ( auto it = pos.find( d ); it != pos.end() )
                a[ i ][ it->second ] -= p;
        }
    }
    auto x = detail::solve_linear( std::move( a ), std::move( b ) );
    for ( std::size_t i = 0; i < n; ++i )
        out[ order[ i ] ] = x[ i ];
    return out;
}

inline rational reach_prob( const mc& m, state_index from, const state_set& target )
{
    m.check_state( from );
    if ( target.count( from ) )
        return rational( 1 );
    // Solve only over the part reachable from `from`.
    state_set live = reachable_from( m, from );
    state_set sub_target;
    for ( auto t : target ) {
        m.check_state( t );
        if ( live.count( t ) )
            sub_target.insert( t );
    }
    if ( sub_target.empty() )
        return rational( 0 );
    state_set kept = live;
    std::vector< mc::row_type > rows( m.state_count() );
    for ( auto s : kept )
        rows[ s ] = m.row( s );
    mc sub( m.names(), m.labels(), from, std::move( rows ) );
    return reach_probabilities( sub, sub_target )[ from ];
}

inline rational reach_prob( const mc& m, state_index from, const label& target,
                            label_match mode = label_match::exact )
{
    return reach_prob( m, from, states_with_label( m, target, mode ) );
}

namespace detail
{

// Copy of m where the given states keep only a probability-1 self-loop.
inline mc make_absorbing( const mc& m, const state_set& states )
{
    std::vector< mc::row_type > rows = m.rows();
    for ( auto s : states ) {
        m.check_state( s );
        rows[ s ] = { { s, rational( 1 ) } };
    }
    return mc( m.names(), m.labels(), m.initial(), std::move( rows ) );
}

// sum_{s'} p(from)(s') * y(s'), y = reach prob of target in the copy where
// taboo and target states are absorbing.
inline rational one_step_avoid( const mc& m, state_index from, const state_set& taboo, const state_set& target )
{
    state_set stop = taboo;
    stop.insert( target.begin(), target.end() );
    mc copy = make_absorbing( m, stop );
    auto y = reach_probabilities( copy, target );
    rational acc( 0 );
    for ( const auto& [ d, p ] : m.row( from ) )
        acc += p * y[ d ];
    return acc;
}

} // namespace detail

// Probability of hitting `target` with every state strictly after position 0
// and before the hit outside `taboo`. 1 when from is a target state.
inline rational reach_avoid_prob( const mc& m, state_index from, const state_set& taboo, const state_set& target )
{
    m.check_state( from );
    for ( auto t : target )
        m.check_state( t );
    if ( target.count( from ) )
        return rational( 1 );
    state_set effective;
    for ( auto t : taboo )
        if ( !target.count( t ) )
            effective.insert( t );
    return detail::one_step_avoid( m, from, effective, target );
}

// Probability of coming back to s after at least one step, avoiding `taboo`
// before the return.
inline rational return_avoid_prob( const mc& m, state_index s, const state_set& taboo )
{
    m.check_state( s );
    state_set effective;
    for ( auto t : taboo )
        if ( t != s )
            effective.insert( t );
    return detail::one_step_avoid( m, s, effective, { s } );
}

struct bisimulation_result
{
    bool bisimilar = false;
    // Block of every state of the disjoint union (first chain, then second).
    std::vector< std::size_t > block;
};

inline bisimulation_result bisimulation( const mc& a, const mc& b )
{
    const std::size_t na = a.state_count();
    const std::size_t n = na + b.state_count();
    auto label_of = [ & ]( std::size_t u ) -> const label& { return u < na ? a.labels_of( u ) : b.labels_of( u - na ); };
    auto row_of = [ & ]( std::size_t u ) -> const mc::row_type& { return u < na ? a.row( u ) : b.row( u - na ); };
    auto shift = [ & ]( std::size_t u ) { return u < na ? std::size_t( 0 ) : na; };

    std::vector< std::size_t > block( n );
    {
        std::map< label, std::size_t > ids;
        for ( std::size_t u = 0; u < n; ++u )
            block[ u ] = ids.emplace( label_of( u ), ids.size() ).first->second;
    }
    std::size_t count = 0;
    while ( true ) {
        using signature = std::pair< std::size_t, std::map< std::size_t, rational > >;
        std::map< signature, std::size_t > ids;
        std::vector< std::size_t > next( n );
        for ( std::size_t u = 0; u < n; ++u ) {
            signature sig{ block[ u ], {} };
            for ( const auto& [ d, p ] : row_of( u ) )
                if ( p != 0 )
                    sig.second[ block[ d + shift( u ) ] ] += p;
            next[ u ] = ids.emplace( std::move( sig ), ids.size() ).first->second;
        }
        block = std::move( next );
        if ( ids.size() == count )
            break;
        count = ids.size();
    }
    return { block[ a.initial() ] == block[ na + b.initial() ], std::move( block ) };
}

inline bool bisimilar( const mc& a, const mc& b ) { return bisimulation( a, b ).bisimilar; }

struct ofa_result
{
    bool ok = false;
    std::string reason;
    std::optional< std::pair< state_index, state_index > > transition;
};

// Once-and-for-all satisfaction: same states, initial state and labels, and
// every transition of a reachable state inside its interval.
inline ofa_result satisfies_ofa( const mc& m, const imc& i )
{
    if ( m.state_count() != i.state_count() )
        return { false, "state counts differ", std::nullopt };
    if ( m.initial() != i.initial() )
        return { false, "initial states differ", std::nullopt };
    for ( state_index s = 0; s < m.state_count(); ++s )
        if ( m.labels_of( s ) != i.labels_of( s ) )
            return { false, "labels of " + m.name( s ) + " differ", std::nullopt };
    for ( auto s : reachable_from( m, m.initial() ) ) {
        std::set< state_index > targets;
        for ( const auto& [ d, _ ] : m.row( s ) )
            targets.insert( d );
        for ( const auto& [ d, _ ] : i.row( s ) )
            targets.insert( d );
        for ( auto d : targets ) {
            const auto* p = m.find( s, d );
            const auto* iv = i.find( s, d );
            rational value = p ? *p : rational( 0 );
            interval allowed = iv ? *iv : interval::point( 0 );
            if ( !allowed.contains( value ) )
                return { false, "p(" + m.name( s ) + ")(" + m.name( d ) + ") = " + to_string( value ) + " outside interval",
                         std::make_pair( s, d ) };
        }
    }
    return { true, "", std::nullopt };
}

} // namespace pimc
