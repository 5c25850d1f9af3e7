const MongoClient = require('mongodb').MongoClient;
const client = new MongoClient('mongodb://localhost:27017');
const dbName = 'shop';
const ORDERS = 'orders';

function restock(limit) {
  let i = 0;
  while (i < limit) {
    client.db(dbName).collection('products').findOne({ sku: i }, (err, product) => {
      if (product.stock <= 2) {
        const supplierId = product.supplier_id;
        client.db(dbName).collection('suppliers').findOne({ _id: supplierId }, (err, supplier) => {
          console.log(product.name + ' from ' + supplier.name);
        });
      } else if (product.discontinued == true) {
        console.log('skip ' + product.name);
      } else {
        console.log(product.stock);
      }
    });
    i = i + 1;
  }
}

function recentOrders(customer) {
  client.db(dbName).collection(ORDERS).find({ customer: customer }).toArray((err, orders) => {
    orders.forEach(function (order) {
      if (order.total > 100.5) {
        console.log(order.code);
      }
    });
  });
}
