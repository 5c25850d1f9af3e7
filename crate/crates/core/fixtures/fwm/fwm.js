client.db(dbName).collection('users').findOne(
  { name: 'Brian' }, (err, user) => {

    client.db(dbName).collection('movies').findOne(
      { _id: user.watchedMovies[0].movie_id },
      (err, movie) => {
        if (user.watchedMovies[0].stars >= 5) {
          console.log(user.name + ' ' + user.surname);
          console.log(user.email +
            ' Last watched movie:');
          console.log(movie.title + ' ' +
            user.watchedMovies[0].stars);
        }
      });
  });
